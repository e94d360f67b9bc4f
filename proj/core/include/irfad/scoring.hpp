#pragma once

#include "irfad/tensor.hpp"

#include <cstddef>
#include <span>

namespace irfad {

/// Feature-scale map (h x w) and its bilinear upsample (H x W).
struct ScoreMap {
    Tensor feature_scale;
    Tensor full_scale;
};

/// s = s_diff + s_nll, where s_diff is the range of the feature-scale map and
/// s_nll = 0.5 * sum(delta^2), the standard-Gaussian negative log-likelihood
/// of delta without its constant (n / 2) log(2 pi).
struct ImageScore {
    double s = 0.0;
    double s_diff = 0.0;
    double s_nll = 0.0;
};

/// Channel-wise L2 norm of a (c, h, w) field, giving an (h, w) map.
Tensor channel_norm_map(const Tensor& delta);

/// Corner-aligned bilinear resize of an (h, w) map to (H, W). Target pixel
/// (I, J) samples source coordinate (I (h - 1) / (H - 1), J (w - 1) / (W - 1)),
/// or 0 along an axis of size 1, and blends the four surrounding cells with
/// std::lerp, first along columns, then rows. Output stays within the
/// input's range.
Tensor bilinear_upsample(const Tensor& map, std::size_t out_height, std::size_t out_width);

/// Throws ParameterError when the target is smaller than the field.
ScoreMap score_map(const Tensor& delta, std::size_t out_height, std::size_t out_width);

/// delta must be (c, h, w) and finite.
ImageScore image_score(const Tensor& delta);

/// Mean and standard deviation of each score component over normal samples,
/// for the optional standardized sum.
struct ComponentStats {
    double diff_mean = 0.0;
    double diff_std = 1.0;
    double nll_mean = 0.0;
    double nll_std = 1.0;
};

ComponentStats fit_component_stats(std::span<const ImageScore> normal_scores);

/// Each component replaced by its z-score; s is their sum. A component with
/// zero spread on the reference set is centred but not scaled.
ImageScore standardize(const ImageScore& score, const ComponentStats& stats);

} // namespace irfad
