#include "irfad/scoring.hpp"

#include "irfad/errors.hpp"

#include <algorithm>
#include <cmath>

namespace irfad {

namespace {

void require_field(const Tensor& delta) {
    if (delta.rank() != 3) throw ShapeError("expected a (c, h, w) field, got " + shape_string(delta.shape()));
    if (!delta.all_finite()) throw NumericError("field contains non-finite values");
}

double source_coord(std::size_t i, std::size_t out, std::size_t in) {
    if (out <= 1 || in <= 1) return 0.0;
    return static_cast<double>(i * (in - 1)) / static_cast<double>(out - 1);
}

} // namespace

Tensor channel_norm_map(const Tensor& delta) {
    require_field(delta);
    const std::size_t c = delta.dim(0), h = delta.dim(1), w = delta.dim(2);
    Tensor out({h, w});
    for (std::size_t p = 0; p < h * w; ++p) {
        double s = 0.0;
        for (std::size_t r = 0; r < c; ++r) {
            const double v = delta[r * h * w + p];
            s += v * v;
        }
        out[p] = std::sqrt(s);
    }
    return out;
}

Tensor bilinear_upsample(const Tensor& map, std::size_t out_height, std::size_t out_width) {
    if (map.rank() != 2) throw ShapeError("bilinear_upsample expects an (h, w) map");
    const std::size_t h = map.dim(0), w = map.dim(1);
    if (out_height < 1 || out_width < 1) throw ParameterError("upsample target must be positive");
    Tensor out({out_height, out_width});
    for (std::size_t y = 0; y < out_height; ++y) {
        const double sy = source_coord(y, out_height, h);
        const auto y0 = std::min(static_cast<std::size_t>(sy), h - 1);
        const std::size_t y1 = std::min(y0 + 1, h - 1);
        const double fy = sy - static_cast<double>(y0);
        for (std::size_t x = 0; x < out_width; ++x) {
            const double sx = source_coord(x, out_width, w);
            const auto x0 = std::min(static_cast<std::size_t>(sx), w - 1);
            const std::size_t x1 = std::min(x0 + 1, w - 1);
            const double fx = sx - static_cast<double>(x0);
            const double top = std::lerp(map[y0 * w + x0], map[y0 * w + x1], fx);
            const double bottom = std::lerp(map[y1 * w + x0], map[y1 * w + x1], fx);
            out[y * out_width + x] = std::lerp(top, bottom, fy);
        }
    }
    return out;
}

ScoreMap score_map(const Tensor& delta, std::size_t out_height, std::size_t out_width) {
    require_field(delta);
    if (out_height < delta.dim(1) || out_width < delta.dim(2)) {
        throw ParameterError("score map target " + std::to_string(out_height) + "x" + std::to_string(out_width) +
                             " is smaller than the field");
    }
    Tensor feature = channel_norm_map(delta);
    Tensor full = bilinear_upsample(feature, out_height, out_width);
    return ScoreMap{std::move(feature), std::move(full)};
}

ImageScore image_score(const Tensor& delta) {
    const Tensor map = channel_norm_map(delta);
    const auto [lo, hi] = std::minmax_element(map.data().begin(), map.data().end());
    double sq = 0.0;
    for (double v : delta.data()) sq += v * v;
    ImageScore out;
    out.s_diff = *hi - *lo;
    out.s_nll = 0.5 * sq;
    out.s = out.s_diff + out.s_nll;
    return out;
}

ComponentStats fit_component_stats(std::span<const ImageScore> normal_scores) {
    if (normal_scores.size() < 2) throw ParameterError("component statistics need at least two scores");
    const auto n = static_cast<double>(normal_scores.size());
    ComponentStats st;
    st.diff_mean = 0.0;
    st.nll_mean = 0.0;
    for (const auto& s : normal_scores) {
        st.diff_mean += s.s_diff;
        st.nll_mean += s.s_nll;
    }
    st.diff_mean /= n;
    st.nll_mean /= n;
    double vd = 0.0, vn = 0.0;
    for (const auto& s : normal_scores) {
        vd += (s.s_diff - st.diff_mean) * (s.s_diff - st.diff_mean);
        vn += (s.s_nll - st.nll_mean) * (s.s_nll - st.nll_mean);
    }
    st.diff_std = std::sqrt(vd / (n - 1.0));
    st.nll_std = std::sqrt(vn / (n - 1.0));
    return st;
}

ImageScore standardize(const ImageScore& score, const ComponentStats& stats) {
    auto z = [](double v, double mean, double sd) { return sd > 0.0 ? (v - mean) / sd : v - mean; };
    ImageScore out;
    out.s_diff = z(score.s_diff, stats.diff_mean, stats.diff_std);
    out.s_nll = z(score.s_nll, stats.nll_mean, stats.nll_std);
    out.s = out.s_diff + out.s_nll;
    return out;
}

} // namespace irfad
