#pragma once

#include "irfad/data.hpp"
#include "irfad/metrics.hpp"
#include "irfad/net.hpp"
#include "irfad/schedule.hpp"
#include "irfad/scoring.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace irfad {

enum class ScorerKind { irf_mean, irf_noisy, recon, ddim };

/// CLI spelling: irf-mean, irf-noisy, recon, ddim.
const char* to_string(ScorerKind kind) noexcept;
/// Throws ParameterError for an unknown name.
ScorerKind parse_scorer(std::string_view name);

struct ScorerConfig {
    ScorerKind kind = ScorerKind::irf_mean;
    int t = 500;
    /// Root of the per-sample noise for irf-noisy and recon; sample i uses
    /// CounterRng(eps_seed).split(i).
    std::uint64_t eps_seed = 0;
    int recon_t_start = 500;
    int recon_steps = 50;
    int ddim_steps = 3;
    std::size_t batch = 256;
    /// Replace s by the sum of z-scored components (IRF scorers only).
    bool standardize = false;

    void validate(const NoiseSchedule& schedule) const;
};

/// Scores of every sample in one split.
struct ScoreSet {
    ScorerKind kind = ScorerKind::irf_mean;
    /// Image-level anomaly score per sample.
    std::vector<double> scores;
    /// IRF scorers only: the raw components, one per sample.
    std::vector<ImageScore> components;
    /// IRF scorers on pixel-annotated data: full-scale maps, n x H x W.
    std::vector<double> maps;
    std::size_t map_height = 0;
    std::size_t map_width = 0;
    std::size_t nfe = 0;
};

/// Scores a split batch by batch. Maps are produced at the mask resolution
/// when the split carries masks. Results do not depend on cfg.batch.
ScoreSet score_dataset(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                       const ScorerConfig& cfg);

/// Raw IRF fields of every sample as an [n x d] matrix (IRF scorers only),
/// using the same per-sample noise as score_dataset.
Tensor irf_fields(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                  const ScorerConfig& cfg, NfeCounter& nfe);

/// Fits z-score statistics on a (normal) reference split with the same scorer.
ComponentStats fit_standardization(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& reference,
                                   const ScorerConfig& cfg);

/// Rewrites scores as standardized sums; requires components.
void apply_standardization(ScoreSet& set, const ComponentStats& stats);

/// Image metrics always; pixel metrics when the set has maps and the data has masks.
EvalReport evaluate(const ScoreSet& set, const Dataset& data, double fpr_limit = 0.3);

/// Times the scorer over the split with the throughput harness.
ThroughputResult measure_throughput(const NoisePredictor& net, const NoiseSchedule& schedule, const Dataset& data,
                                    const ScorerConfig& cfg, int repeats = 5);

} // namespace irfad
