#include "irfad/metrics.hpp"

#include "irfad/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace irfad {

namespace {

struct Counts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

Counts check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw ShapeError("scores and labels differ in length");
    Counts c;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] > 1) throw ParameterError("labels must be 0 or 1");
        if (!std::isfinite(scores[i])) throw NumericError("scores must be finite");
        (labels[i] ? c.positives : c.negatives)++;
    }
    return c;
}

std::vector<std::size_t> descending_order(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

// Calls visit(tp, fp) after each group of tied scores, highest first.
template <typename Visit>
void sweep(std::span<const double> scores, std::span<const std::uint8_t> labels, Visit&& visit) {
    const auto order = descending_order(scores);
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] ? tp : fp)++;
            ++i;
        }
        visit(tp, fp);
    }
}

} // namespace

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const Counts c = check_inputs(scores, labels);
    if (c.positives == 0 || c.negatives == 0) throw UndefinedMetricError("AU-ROC needs both classes");
    // Twice the trapezoid area in units of one (TP, FP) cell, accumulated exactly.
    std::uint64_t twice_area = 0;
    std::size_t prev_tp = 0, prev_fp = 0;
    sweep(scores, labels, [&](std::size_t tp, std::size_t fp) {
        twice_area += static_cast<std::uint64_t>(fp - prev_fp) * (tp + prev_tp);
        prev_tp = tp;
        prev_fp = fp;
    });
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(c.positives) * static_cast<double>(c.negatives));
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const Counts c = check_inputs(scores, labels);
    if (c.positives == 0) throw UndefinedMetricError("AP needs at least one positive");
    const auto P = static_cast<double>(c.positives);
    double ap = 0.0;
    std::size_t prev_tp = 0;
    sweep(scores, labels, [&](std::size_t tp, std::size_t fp) {
        if (tp != prev_tp) {
            const double recall_gain = static_cast<double>(tp - prev_tp) / P;
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            ap += recall_gain * precision;
        }
        prev_tp = tp;
    });
    return ap;
}

double f1_max(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    const Counts c = check_inputs(scores, labels);
    if (c.positives == 0) throw UndefinedMetricError("F1-max needs at least one positive");
    double best = 0.0;
    sweep(scores, labels, [&](std::size_t tp, std::size_t fp) {
        const std::size_t fn = c.positives - tp;
        const double f1 = 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
        best = std::max(best, f1);
    });
    return best;
}

std::vector<int> connected_components(std::span<const std::uint8_t> mask, std::size_t height, std::size_t width,
                                      std::size_t& count) {
    if (mask.size() != height * width) throw ShapeError("mask size does not match its dimensions");
    std::vector<int> label(mask.size(), -1);
    std::vector<std::size_t> stack;
    count = 0;
    for (std::size_t start = 0; start < mask.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        const int id = static_cast<int>(count++);
        label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            const auto y = static_cast<std::ptrdiff_t>(p / width), x = static_cast<std::ptrdiff_t>(p % width);
            for (std::ptrdiff_t dy = -1; dy <= 1; ++dy) {
                for (std::ptrdiff_t dx = -1; dx <= 1; ++dx) {
                    const auto ny = y + dy, nx = x + dx;
                    if (ny < 0 || nx < 0 || ny >= static_cast<std::ptrdiff_t>(height) ||
                        nx >= static_cast<std::ptrdiff_t>(width)) {
                        continue;
                    }
                    const auto q = static_cast<std::size_t>(ny) * width + static_cast<std::size_t>(nx);
                    if (mask[q] && label[q] < 0) {
                        label[q] = id;
                        stack.push_back(q);
                    }
                }
            }
        }
    }
    return label;
}

double aupro(std::span<const double> maps, std::span<const std::uint8_t> masks, std::size_t height,
             std::size_t width, double fpr_limit) {
    if (maps.size() != masks.size()) throw ShapeError("score maps and masks differ in size");
    const std::size_t area = height * width;
    if (area == 0 || maps.size() % area != 0) throw ShapeError("maps are not a whole number of images");
    if (!(fpr_limit > 0.0 && fpr_limit <= 1.0)) throw ParameterError("fpr_limit must lie in (0, 1]");
    const std::size_t images = maps.size() / area;

    // Global region id per pixel, or -1 for normal pixels.
    std::vector<int> region(maps.size(), -1);
    std::vector<std::size_t> region_size;
    std::size_t negatives = 0;
    for (std::size_t img = 0; img < images; ++img) {
        auto m = masks.subspan(img * area, area);
        for (auto v : m) {
            if (v > 1) throw ParameterError("masks must be binary");
        }
        std::size_t n_local = 0;
        const auto local = connected_components(m, height, width, n_local);
        const auto offset = static_cast<int>(region_size.size());
        region_size.resize(region_size.size() + n_local, 0);
        for (std::size_t p = 0; p < area; ++p) {
            if (local[p] >= 0) {
                region[img * area + p] = offset + local[p];
                region_size[static_cast<std::size_t>(offset + local[p])]++;
            } else {
                ++negatives;
            }
        }
    }
    for (double v : maps) {
        if (!std::isfinite(v)) throw NumericError("score maps must be finite");
    }
    if (region_size.empty()) throw UndefinedMetricError("AU-PRO needs at least one anomalous region");
    if (negatives == 0) throw UndefinedMetricError("AU-PRO needs at least one normal pixel");

    const auto order = descending_order(maps);
    std::vector<std::size_t> hits(region_size.size(), 0);
    const auto K = static_cast<double>(region_size.size());
    const auto N = static_cast<double>(negatives);
    std::size_t fp = 0;
    double prev_fpr = 0.0, prev_pro = 0.0, pro = 0.0, area_sum = 0.0;

    for (std::size_t i = 0; i < order.size();) {
        const double s = maps[order[i]];
        bool region_hit = false;
        while (i < order.size() && maps[order[i]] == s) {
            const int r = region[order[i]];
            if (r >= 0) {
                hits[static_cast<std::size_t>(r)]++;
                region_hit = true;
            } else {
                ++fp;
            }
            ++i;
        }
        if (region_hit) {
            double overlap = 0.0;
            for (std::size_t k = 0; k < hits.size(); ++k) {
                overlap += static_cast<double>(hits[k]) / static_cast<double>(region_size[k]);
            }
            pro = overlap / K;
        }
        const double fpr = static_cast<double>(fp) / N;
        if (fpr >= fpr_limit) {
            const double f = (fpr_limit - prev_fpr) / (fpr - prev_fpr);
            const double pro_at_limit = prev_pro + f * (pro - prev_pro);
            area_sum += 0.5 * (fpr_limit - prev_fpr) * (prev_pro + pro_at_limit);
            return area_sum / fpr_limit;
        }
        area_sum += 0.5 * (fpr - prev_fpr) * (prev_pro + pro);
        prev_fpr = fpr;
        prev_pro = pro;
    }
    // Unreachable: the last group brings FPR to 1 >= fpr_limit.
    return area_sum / fpr_limit;
}

double EvalReport::mad() const {
    double sum = 0.0;
    int n = 0;
    for (const auto& m : {image_auroc, image_ap, image_f1_max, pixel_auroc, pixel_ap, pixel_f1_max, pixel_aupro}) {
        if (m) {
            sum += *m;
            ++n;
        }
    }
    return n ? sum / n : 0.0;
}

ThroughputResult throughput(const BatchScorer& scorer, std::size_t n_samples, std::size_t batch, int repeats) {
    if (n_samples == 0) throw ParameterError("throughput needs a non-empty dataset");
    if (batch == 0 || repeats < 1) throw ParameterError("throughput needs batch >= 1 and repeats >= 1");
    auto pass = [&](NfeCounter& nfe) {
        for (std::size_t first = 0; first < n_samples; first += batch) {
            scorer(first, std::min(batch, n_samples - first), nfe);
        }
    };
    NfeCounter warmup;
    pass(warmup);

    ThroughputResult out;
    for (int r = 0; r < repeats; ++r) {
        NfeCounter nfe;
        const auto start = std::chrono::steady_clock::now();
        pass(nfe);
        out.pass_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
        out.nfe = nfe.count();
    }
    auto sorted = out.pass_seconds;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                            : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    out.samples_per_sec = median > 0.0 ? static_cast<double>(n_samples) / median : 0.0;
    return out;
}

} // namespace irfad
