#include "irfad/pipeline.hpp"

#include "irfad/baselines.hpp"
#include "irfad/errors.hpp"
#include "irfad/irf.hpp"
#include "irfad/rng.hpp"

#include <algorithm>
#include <string>

namespace irfad {

const char* to_string(ScorerKind kind) noexcept {
    switch (kind) {
    case ScorerKind::irf_mean: return "irf-mean";
    case ScorerKind::irf_noisy: return "irf-noisy";
    case ScorerKind::recon: return "recon";
    case ScorerKind::ddim: return "ddim";
    }
    return "?";
}

ScorerKind parse_scorer(std::string_view name) {
    for (auto k : {ScorerKind::irf_mean, ScorerKind::irf_noisy, ScorerKind::recon, ScorerKind::ddim}) {
        if (name == to_string(k)) return k;
    }
    throw ParameterError("unknown scorer '" + std::string(name) + "' (irf-mean, irf-noisy, recon, ddim)");
}

void ScorerConfig::validate(const NoiseSchedule& schedule) const {
    if (batch == 0) throw ParameterError("scorer batch must be >= 1");
    switch (kind) {
    case ScorerKind::irf_mean:
    case ScorerKind::irf_noisy: schedule.check_step(t); break;
    case ScorerKind::recon:
        schedule.check_step(recon_t_start);
        if (recon_steps < 1 || recon_steps > recon_t_start) {
            throw ParameterError("recon steps must lie in [1, t_start]");
        }
        break;
    case ScorerKind::ddim:
        if (ddim_steps < 1 || ddim_steps > schedule.steps()) throw ParameterError("ddim steps must lie in [1, T]");
        break;
    }
    if (standardize && (kind == ScorerKind::recon || kind == ScorerKind::ddim)) {
        throw ParameterError("standardization applies to IRF scorers only");
    }
}

namespace {

bool is_irf(ScorerKind k) { return k == ScorerKind::irf_mean || k == ScorerKind::irf_noisy; }

Tensor noise_rows(std::uint64_t seed, std::size_t first, std::size_t count, std::size_t d) {
    const CounterRng root(seed);
    Tensor eps({count, d});
    for (std::size_t i = 0; i < count; ++i) {
        CounterRng rng = root.split(first + i);
        for (std::size_t j = 0; j < d; ++j) eps.at(i, j) = rng.normal();
    }
    return eps;
}

// Scores rows [first, first + count) into `out`, which is pre-sized.
void score_batch(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                 const ScorerConfig& cfg, std::size_t first, std::size_t count, NfeCounter& nfe, ScoreSet* out) {
    const Tensor x0 = data.batch(first, count);
    switch (cfg.kind) {
    case ScorerKind::recon: {
        const auto s = reconstruct_scores(net, schedule, x0, cfg.recon_t_start, cfg.recon_steps,
                                          CounterRng(cfg.eps_seed), first, nfe);
        if (out) std::copy(s.begin(), s.end(), out->scores.begin() + static_cast<std::ptrdiff_t>(first));
        return;
    }
    case ScorerKind::ddim: {
        const auto s = ddim_invert_scores(net, schedule, x0, cfg.ddim_steps, nfe);
        if (out) std::copy(s.begin(), s.end(), out->scores.begin() + static_cast<std::ptrdiff_t>(first));
        return;
    }
    case ScorerKind::irf_mean:
    case ScorerKind::irf_noisy: break;
    }

    const std::size_t d = data.sample_dim();
    const Tensor delta = cfg.kind == ScorerKind::irf_mean
                             ? irf_mean_batch(net, schedule, x0, cfg.t, nfe)
                             : irf_noisy_batch(net, schedule, x0, cfg.t, noise_rows(cfg.eps_seed, first, count, d), nfe);
    if (!out) return;
    const MapDims& dims = data.dims();
    const std::size_t area = out->map_height * out->map_width;
    for (std::size_t i = 0; i < count; ++i) {
        const auto row = delta.data().subspan(i * d, d);
        const Tensor field({dims.channels, dims.height, dims.width}, std::vector<double>(row.begin(), row.end()));
        const ImageScore score = image_score(field);
        out->components[first + i] = score;
        out->scores[first + i] = score.s;
        if (area) {
            const ScoreMap map = score_map(field, out->map_height, out->map_width);
            std::copy(map.full_scale.values().begin(), map.full_scale.values().end(),
                      out->maps.begin() + static_cast<std::ptrdiff_t>((first + i) * area));
        }
    }
}

} // namespace

ScoreSet score_dataset(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                       const ScorerConfig& cfg) {
    cfg.validate(schedule);
    if (data.sample_dim() != net.input_dim()) {
        throw ShapeError("dataset samples have " + std::to_string(data.sample_dim()) + " values, net expects " +
                         std::to_string(net.input_dim()));
    }
    const std::size_t n = data.size();
    ScoreSet out;
    out.kind = cfg.kind;
    out.scores.assign(n, 0.0);
    if (is_irf(cfg.kind)) {
        out.components.assign(n, ImageScore{});
        if (data.has_masks()) {
            out.map_height = data.masks().height;
            out.map_width = data.masks().width;
            out.maps.assign(n * out.map_height * out.map_width, 0.0);
        }
    }
    NfeCounter nfe;
    for (std::size_t first = 0; first < n; first += cfg.batch) {
        score_batch(net, schedule, data, cfg, first, std::min(cfg.batch, n - first), nfe, &out);
    }
    out.nfe = nfe.count();
    return out;
}

Tensor irf_fields(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                  const ScorerConfig& cfg, NfeCounter& nfe) {
    cfg.validate(schedule);
    if (!is_irf(cfg.kind)) throw ParameterError("irf_fields needs an IRF scorer");
    const Tensor x0 = data.batch(0, data.size());
    if (cfg.kind == ScorerKind::irf_mean) return irf_mean_batch(net, schedule, x0, cfg.t, nfe);
    return irf_noisy_batch(net, schedule, x0, cfg.t, noise_rows(cfg.eps_seed, 0, data.size(), data.sample_dim()), nfe);
}

ComponentStats fit_standardization(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& reference,
                                   const ScorerConfig& cfg) {
    if (!is_irf(cfg.kind)) throw ParameterError("standardization applies to IRF scorers only");
    ScorerConfig plain = cfg;
    plain.standardize = false;
    const ScoreSet ref = score_dataset(net, schedule, reference, plain);
    return fit_component_stats(ref.components);
}

void apply_standardization(ScoreSet& set, const ComponentStats& stats) {
    if (set.components.size() != set.scores.size()) throw ContractError("score set has no components to standardize");
    for (std::size_t i = 0; i < set.scores.size(); ++i) set.scores[i] = standardize(set.components[i], stats).s;
}

EvalReport evaluate(const ScoreSet& set, const Dataset& data, double fpr_limit) {
    if (set.scores.size() != data.size()) throw ShapeError("score count does not match the dataset");
    EvalReport r;
    const auto labels = data.label_bytes();
    r.image_auroc = auroc(set.scores, labels);
    r.image_ap = average_precision(set.scores, labels);
    r.image_f1_max = f1_max(set.scores, labels);
    if (!set.maps.empty() && data.has_masks()) {
        const auto& masks = data.masks().values;
        r.pixel_auroc = auroc(set.maps, masks);
        r.pixel_ap = average_precision(set.maps, masks);
        r.pixel_f1_max = f1_max(set.maps, masks);
        r.pixel_aupro = aupro(set.maps, masks, set.map_height, set.map_width, fpr_limit);
    }
    r.nfe = set.nfe;
    return r;
}

ThroughputResult measure_throughput(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                                    const ScorerConfig& cfg, int repeats) {
    cfg.validate(schedule);
    // Image scores only: the timed work is the network plus the image reduction.
    ScoreSet sink;
    sink.scores.assign(data.size(), 0.0);
    if (is_irf(cfg.kind)) sink.components.assign(data.size(), ImageScore{});
    return throughput(
        [&](std::size_t first, std::size_t count, NfeCounter& nfe) {
            score_batch(net, schedule, data, cfg, first, count, nfe, &sink);
        },
        data.size(), cfg.batch, repeats);
}

} // namespace irfad
