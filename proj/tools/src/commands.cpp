#include "cli/commands.hpp"

#include "irfad/binary_io.hpp"
#include "irfad/errors.hpp"
#include "irfad/irf.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace irfad::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointFile = "checkpoint.bin";

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

void write_manifest(const RunConfig& cfg) { write_file_atomic(cfg.out / "run_manifest.txt", render_manifest(cfg)); }

NoiseSchedule make_schedule(const RunConfig& cfg) {
    return NoiseSchedule::linear(cfg.schedule.steps, cfg.schedule.beta_start, cfg.schedule.beta_end);
}

std::string dataset_id(const Dataset& d) {
    return d.provenance().generator + ":" + std::to_string(d.provenance().seed);
}

ScorerConfig scorer_for(const RunConfig& cfg, std::size_t input_dim) {
    ScorerConfig sc = cfg.scorer;
    sc.t = cfg.resolved_t(input_dim);
    return sc;
}

TrainResult fit(const RunConfig& cfg, const Dataset& train_split, const NoiseSchedule& schedule, std::ostream& log) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    tc.dataset_id = dataset_id(train_split);
    tc.validate();
    auto net = NoisePredictor::create(cfg.net_config(train_split.sample_dim()), schedule.params(), cfg.seed);
    log << "training " << net.parameter_count() << " parameters on " << train_split.size() << " samples for "
        << tc.epochs << " epochs\n";
    return train(std::move(net), train_split, schedule, tc, [&](int epoch, double loss, double) {
        if (epoch == 1 || epoch % 20 == 0 || epoch == tc.epochs) log << "  epoch " << epoch << " loss " << loss << '\n';
    });
}

void write_train_outputs(const RunConfig& cfg, const TrainResult& result) {
    save_checkpoint(result.net, cfg.out / kCheckpointFile);
    std::string csv = "epoch,mean_loss,seconds\n";
    for (std::size_t e = 0; e < result.log.epoch_loss.size(); ++e) {
        csv += std::to_string(e + 1) + "," + num(result.log.epoch_loss[e]) + "," + num(result.log.epoch_seconds[e]) +
               "\n";
    }
    write_file_atomic(cfg.out / "train_log.csv", csv);
}

struct Loaded {
    DatasetSplits data;
    NoiseSchedule schedule;
    NoisePredictor net;
};

Loaded load_inputs(const RunConfig& cfg) {
    auto data = load_dataset(cfg.dataset);
    auto schedule = make_schedule(cfg);
    auto net = load_checkpoint(cfg.checkpoint, schedule.params());
    if (net.input_dim() != data.test.sample_dim()) {
        throw ShapeError("checkpoint expects " + std::to_string(net.input_dim()) + " values per sample, dataset has " +
                         std::to_string(data.test.sample_dim()));
    }
    return {std::move(data), std::move(schedule), std::move(net)};
}

ScoreSet score_test(const Loaded& in, const ScorerConfig& sc) {
    ScoreSet set = score_dataset(in.net, in.schedule, in.data.test, sc);
    if (sc.standardize) apply_standardization(set, fit_standardization(in.net, in.schedule, in.data.train, sc));
    return set;
}

const char* const kEvalHeader =
    "scorer,image_auroc,image_ap,image_f1_max,pixel_auroc,pixel_ap,pixel_f1_max,pixel_aupro,mad,nfe,samples_per_sec\n";

std::string eval_row(ScorerKind kind, const EvalReport& r) {
    return std::string(to_string(kind)) + "," + opt(r.image_auroc) + "," + opt(r.image_ap) + "," +
           opt(r.image_f1_max) + "," + opt(r.pixel_auroc) + "," + opt(r.pixel_ap) + "," + opt(r.pixel_f1_max) + "," +
           opt(r.pixel_aupro) + "," + num(r.mad()) + "," + std::to_string(r.nfe) + "," + num(r.samples_per_sec) +
           "\n";
}

void print_report(std::ostream& log, ScorerKind kind, const EvalReport& r) {
    const auto line = [&](const char* name, const std::optional<double>& v) {
        char buf[64];
        if (v) {
            std::snprintf(buf, sizeof buf, "  %-14s %8.4f\n", name, *v);
        } else {
            std::snprintf(buf, sizeof buf, "  %-14s %8s\n", name, "-");
        }
        log << buf;
    };
    log << "scorer " << to_string(kind) << '\n';
    line("image AU-ROC", r.image_auroc);
    line("image AP", r.image_ap);
    line("image F1-max", r.image_f1_max);
    line("pixel AU-ROC", r.pixel_auroc);
    line("pixel AP", r.pixel_ap);
    line("pixel F1-max", r.pixel_f1_max);
    line("pixel AU-PRO", r.pixel_aupro);
    line("mAD", r.mad());
    log << "  NFE            " << r.nfe << '\n';
    line("samples/sec", r.samples_per_sec);
}

} // namespace

void cmd_gen(const RunConfig& cfg, std::ostream& log) {
    DatasetSplits data = cfg.generator == "toy" ? gen_toy(cfg.seed) : gen_blobs(cfg.blobs, cfg.seed);
    save_dataset(data, cfg.out);
    write_manifest(cfg);
    log << "wrote " << cfg.generator << " dataset (" << data.train.size() << " train, " << data.test.size()
        << " test) to " << cfg.out.string() << '\n';
}

void cmd_train(const RunConfig& cfg, std::ostream& log) {
    const auto data = load_dataset(cfg.dataset);
    const auto schedule = make_schedule(cfg);
    const auto result = fit(cfg, data.train, schedule, log);
    write_train_outputs(cfg, result);
    write_manifest(cfg);
    log << "final loss " << result.log.final_loss() << "; checkpoint " << (cfg.out / kCheckpointFile).string() << '\n';
}

void cmd_score(const RunConfig& cfg, std::ostream& log) {
    const Loaded in = load_inputs(cfg);
    const ScorerConfig sc = scorer_for(cfg, in.net.input_dim());
    const ScoreSet set = score_test(in, sc);
    const auto& test = in.data.test;

    const bool components = !set.components.empty();
    std::string csv = components ? "id,label,s,s_diff,s_nll\n" : "id,label,s\n";
    for (std::size_t i = 0; i < test.size(); ++i) {
        csv += std::to_string(i) + "," + std::to_string(static_cast<int>(test.label(i))) + "," + num(set.scores[i]);
        if (components) csv += "," + num(set.components[i].s_diff) + "," + num(set.components[i].s_nll);
        csv += '\n';
    }
    write_file_atomic(cfg.out / "scores.csv", csv);

    if (cfg.write_maps) {
        if (set.maps.empty()) throw ConfigError("score.write_maps needs an IRF scorer and a pixel-annotated dataset");
        const std::size_t area = set.map_height * set.map_width;
        const std::string header = "height=" + std::to_string(set.map_height) +
                                   " width=" + std::to_string(set.map_width) +
                                   " dtype=float64 endian=little order=row-major\n";
        for (std::size_t i = 0; i < test.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%06zu", i);
            ByteWriter w;
            w.put_f64s(std::span<const double>(set.maps).subspan(i * area, area));
            write_file_atomic(cfg.out / "maps" / (std::string(name) + ".f64"), w.take());
            write_file_atomic(cfg.out / "maps" / (std::string(name) + ".hdr"), header);
        }
    }
    write_manifest(cfg);
    log << "scored " << test.size() << " samples with " << to_string(sc.kind) << " (NFE " << set.nfe << ")\n";
}

void cmd_eval(const RunConfig& cfg, std::ostream& log) {
    const Loaded in = load_inputs(cfg);
    const ScorerConfig sc = scorer_for(cfg, in.net.input_dim());
    const auto start = std::chrono::steady_clock::now();
    const ScoreSet set = score_test(in, sc);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EvalReport report = evaluate(set, in.data.test, cfg.fpr_limit);
    report.samples_per_sec = seconds > 0 ? static_cast<double>(in.data.test.size()) / seconds : 0.0;
    write_file_atomic(cfg.out / "eval.csv", std::string(kEvalHeader) + eval_row(sc.kind, report));
    write_manifest(cfg);
    print_report(log, sc.kind, report);
}

void cmd_toy(const RunConfig& cfg, std::ostream& log) {
    const DatasetSplits data = gen_toy(cfg.seed);
    const auto schedule = make_schedule(cfg);
    const auto result = fit(cfg, data.train, schedule, log);
    write_train_outputs(cfg, result);

    std::string tsv = "x0\tdelta_abs\tlabel\tinput_kind\n";
    std::string csv = kEvalHeader;
    for (auto kind : {ScorerKind::irf_mean, ScorerKind::irf_noisy}) {
        ScorerConfig sc = scorer_for(cfg, 1);
        sc.kind = kind;
        sc.standardize = false;
        NfeCounter nfe;
        const Tensor fields = irf_fields(result.net, schedule, data.test, sc, nfe);
        const char* input = to_string(kind == ScorerKind::irf_mean ? InputKind::mean_path : InputKind::noisy_state);
        for (std::size_t i = 0; i < data.test.size(); ++i) {
            tsv += num(data.test.sample(i)[0]) + "\t" + num(std::abs(fields[i])) + "\t" +
                   std::to_string(static_cast<int>(data.test.label(i))) + "\t" + input + "\n";
        }
        const EvalReport report = evaluate(score_dataset(result.net, schedule, data.test, sc), data.test);
        csv += eval_row(kind, report);
        print_report(log, kind, report);
    }
    write_file_atomic(cfg.out / "trajectories.tsv", tsv);
    write_file_atomic(cfg.out / "eval.csv", csv);
    write_manifest(cfg);
}

void cmd_bench(const RunConfig& cfg, std::ostream& log) {
    const Loaded in = load_inputs(cfg);
    std::string csv = "scorer,auroc,ap,f1_max,nfe,samples_per_sec\n";
    for (auto kind : {ScorerKind::irf_mean, ScorerKind::ddim, ScorerKind::recon}) {
        ScorerConfig sc = scorer_for(cfg, in.net.input_dim());
        sc.kind = kind;
        sc.standardize = false;
        const ScoreSet set = score_dataset(in.net, in.schedule, in.data.test, sc);
        const EvalReport report = evaluate(set, in.data.test, cfg.fpr_limit);
        const ThroughputResult tp = measure_throughput(in.net, in.schedule, in.data.test, sc, cfg.bench_repeats);
        csv += std::string(to_string(kind)) + "," + opt(report.image_auroc) + "," + opt(report.image_ap) + "," +
               opt(report.image_f1_max) + "," + std::to_string(set.nfe) + "," + num(tp.samples_per_sec) + "\n";
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-10s AU-ROC %.4f  NFE %8zu  %10.1f samples/sec\n", to_string(kind),
                      *report.image_auroc, set.nfe, tp.samples_per_sec);
        log << buf;
    }
    write_file_atomic(cfg.out / "bench.csv", csv);
    write_manifest(cfg);
}

void check_paths(const RunConfig& cfg) {
    const auto& c = cfg.command;
    const bool needs_dataset = c == "train" || c == "score" || c == "eval" || c == "bench";
    const bool needs_checkpoint = c == "score" || c == "eval" || c == "bench";
    if (needs_dataset && (cfg.dataset.empty() || !fs::is_directory(cfg.dataset))) {
        throw ConfigError("dataset directory '" + cfg.dataset.string() + "' does not exist");
    }
    if (needs_checkpoint && (cfg.checkpoint.empty() || !fs::is_regular_file(cfg.checkpoint))) {
        throw ConfigError("checkpoint '" + cfg.checkpoint.string() + "' does not exist");
    }
}

void run_command(const RunConfig& cfg, std::ostream& log) {
    check_paths(cfg);
    const auto& c = cfg.command;
    if (c == "gen") return cmd_gen(cfg, log);
    if (c == "train") return cmd_train(cfg, log);
    if (c == "score") return cmd_score(cfg, log);
    if (c == "eval") return cmd_eval(cfg, log);
    if (c == "toy") return cmd_toy(cfg, log);
    if (c == "bench") return cmd_bench(cfg, log);
    throw ConfigError("unknown command '" + c + "'");
}

int exit_code(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    if (!err) return 1;
    switch (err->kind()) {
    case ErrorKind::config:
    case ErrorKind::parameter: return 2;
    case ErrorKind::data:
    case ErrorKind::io:
    case ErrorKind::shape:
    case ErrorKind::undefined_metric:
    case ErrorKind::checkpoint_version:
    case ErrorKind::checkpoint_schedule:
    case ErrorKind::checkpoint_corrupt: return 3;
    case ErrorKind::numeric:
    case ErrorKind::training_diverged: return 4;
    case ErrorKind::contract: return 1;
    }
    return 1;
}

std::string error_line(const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    std::string msg = e.what();
    for (char& ch : msg) {
        if (ch == '\n' || ch == '\r') ch = ' ';
        if (ch == '"') ch = '\'';
    }
    return std::string("error kind=") + (err ? to_string(err->kind()) : "internal") + " message=\"" + msg + "\"";
}

} // namespace irfad::cli
