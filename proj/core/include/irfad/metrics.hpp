#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "irfad/net.hpp"

namespace irfad {

// All ranking metrics treat a sample as predicted positive when its score is
// >= a threshold, sweep every distinct score as a threshold, and let tied
// scores enter together. Labels are 0 (normal) or 1 (abnormal).

/// Area under the ROC curve by the trapezoidal rule; equals the Mann-Whitney
/// statistic with ties counted as one half. Throws UndefinedMetricError
/// unless both classes are present.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Step-wise average precision: sum over thresholds of
/// (recall increase) * precision. Throws UndefinedMetricError without positives.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Maximum over thresholds of 2 TP / (2 TP + FP + FN).
double f1_max(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Labels 8-connected components of a binary h x w mask. Background is -1,
/// components are numbered from 0 in raster order of their first pixel.
std::vector<int> connected_components(std::span<const std::uint8_t> mask, std::size_t height, std::size_t width,
                                      std::size_t& count);

/// Normalized area under the per-region-overlap curve.
///
/// maps and masks hold n images of height x width back to back. For each
/// threshold, FPR is the fraction of all mask-0 pixels at or above it and PRO
/// the mean, over every connected component of every mask, of the fraction
/// of that component at or above it. The curve starts at (0, 0), is
/// integrated by trapezoids up to fpr_limit (interpolating linearly at the
/// limit) and divided by fpr_limit. Throws UndefinedMetricError when there
/// are no anomalous regions or no normal pixels.
double aupro(std::span<const double> maps, std::span<const std::uint8_t> masks, std::size_t height,
             std::size_t width, double fpr_limit = 0.3);

/// The six detection metrics plus cost figures for one scorer on one dataset.
struct EvalReport {
    std::optional<double> image_auroc;
    std::optional<double> image_ap;
    std::optional<double> image_f1_max;
    std::optional<double> pixel_auroc;
    std::optional<double> pixel_ap;
    std::optional<double> pixel_f1_max;
    std::optional<double> pixel_aupro;
    std::size_t nfe = 0;
    double samples_per_sec = 0.0;

    /// Mean of the detection metrics that are present (all seven for
    /// pixel-annotated data).
    double mad() const;
};

/// Runs one batch [first, first + count) and records evaluations in nfe.
using BatchScorer = std::function<void(std::size_t first, std::size_t count, NfeCounter& nfe)>;

struct ThroughputResult {
    double samples_per_sec = 0.0;
    /// Evaluations consumed by one full pass.
    std::size_t nfe = 0;
    std::vector<double> pass_seconds;
};

/// One untimed warm-up pass, then `repeats` timed passes over n_samples in
/// batches; reports the median pass. Single-threaded.
ThroughputResult throughput(const BatchScorer& scorer, std::size_t n_samples, std::size_t batch, int repeats = 5);

} // namespace irfad
