#include "irfad/errors.hpp"
#include "irfad/metrics.hpp"
#include "irfad/rng.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

using namespace irfad;

namespace {

struct Instance {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
};

// Both classes present; scores drawn from a small grid half the time so ties are common.
Instance random_instance(CounterRng& rng) {
    Instance in;
    const std::size_t n = 2 + rng.below(199);
    const bool coarse = rng.uniform() < 0.5;
    for (std::size_t i = 0; i < n; ++i) {
        in.labels.push_back(static_cast<std::uint8_t>(rng.below(2)));
        in.scores.push_back(coarse ? static_cast<double>(rng.below(6)) : rng.normal());
    }
    in.labels[0] = 0;
    in.labels[1] = 1;
    return in;
}

} // namespace

TEST(Auroc, Examples) {
    const std::vector<std::uint8_t> labels{0, 0, 1, 1};
    EXPECT_EQ(auroc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, labels), 1.0);
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    EXPECT_EQ(auroc(s, labels), oracle::auroc(s, labels));
    EXPECT_EQ(auroc(s, labels), 0.75);
    EXPECT_EQ(auroc(std::vector<double>{1, 1, 1, 1}, labels), 0.5);
}

TEST(Auroc, ChanceLevelForIndependentLabels) {
    CounterRng rng(1);
    std::vector<double> s;
    std::vector<std::uint8_t> l;
    for (int i = 0; i < 20000; ++i) {
        s.push_back(rng.uniform());
        l.push_back(static_cast<std::uint8_t>(rng.below(2)));
    }
    EXPECT_NEAR(auroc(s, l), 0.5, 0.02);
}

TEST(Auroc, SingleClassIsUndefined) {
    EXPECT_THROW((void)auroc(std::vector<double>{1, 2}, std::vector<std::uint8_t>{1, 1}), UndefinedMetricError);
    EXPECT_THROW((void)auroc(std::vector<double>{1, 2}, std::vector<std::uint8_t>{0, 0}), UndefinedMetricError);
    EXPECT_THROW((void)auroc(std::vector<double>{1}, std::vector<std::uint8_t>{0, 1}), ShapeError);
    EXPECT_THROW((void)auroc(std::vector<double>{1, 2}, std::vector<std::uint8_t>{0, 2}), ParameterError);
}

TEST(AveragePrecision, Examples) {
    EXPECT_EQ(average_precision(std::vector<double>{3, 2, 1}, std::vector<std::uint8_t>{1, 1, 0}), 1.0);
    for (std::size_t n : {1u, 2u, 7u, 50u}) {
        std::vector<double> s(n);
        std::vector<std::uint8_t> l(n, 0);
        for (std::size_t i = 0; i < n; ++i) s[i] = double(n - i);
        l[n - 1] = 1;
        EXPECT_DOUBLE_EQ(average_precision(s, l), 1.0 / double(n));
    }
    EXPECT_THROW((void)average_precision(std::vector<double>{1}, std::vector<std::uint8_t>{0}), UndefinedMetricError);
}

TEST(F1Max, ExamplesAndBound) {
    EXPECT_EQ(f1_max(std::vector<double>{0.9, 0.8, 0.1}, std::vector<std::uint8_t>{1, 1, 0}), 1.0);
    CounterRng rng(2);
    for (int k = 0; k < 20; ++k) {
        const Instance in = random_instance(rng);
        const double p = double(std::count(in.labels.begin(), in.labels.end(), 1));
        const double n = double(in.labels.size()) - p;
        EXPECT_GE(f1_max(in.scores, in.labels), 2 * p / (p + n + p) - 1e-15);
    }
    EXPECT_THROW((void)f1_max(std::vector<double>{1}, std::vector<std::uint8_t>{0}), UndefinedMetricError);
}

TEST(RankingMetrics, MatchOracles) {
    CounterRng rng(3);
    for (int k = 0; k < 100; ++k) {
        const Instance in = random_instance(rng);
        ASSERT_EQ(auroc(in.scores, in.labels), oracle::auroc(in.scores, in.labels)) << k;
        ASSERT_EQ(average_precision(in.scores, in.labels), oracle::average_precision(in.scores, in.labels)) << k;
        ASSERT_EQ(f1_max(in.scores, in.labels), oracle::f1_max(in.scores, in.labels)) << k;
    }
}

TEST(RankingMetrics, InvariantUnderIncreasingMaps) {
    CounterRng rng(4);
    for (int k = 0; k < 30; ++k) {
        const Instance in = random_instance(rng);
        std::vector<double> ex, af;
        for (double s : in.scores) {
            ex.push_back(std::exp(s));
            af.push_back(3.0 * s + 7.0);
        }
        for (const auto* t : {&ex, &af}) {
            EXPECT_EQ(auroc(*t, in.labels), auroc(in.scores, in.labels));
            EXPECT_EQ(average_precision(*t, in.labels), average_precision(in.scores, in.labels));
            EXPECT_EQ(f1_max(*t, in.labels), f1_max(in.scores, in.labels));
        }
    }
}

TEST(Auroc, NegationComplementsWithoutTies) {
    CounterRng rng(5);
    for (int k = 0; k < 30; ++k) {
        std::vector<double> s, neg;
        std::vector<std::uint8_t> l;
        for (int i = 0; i < 60; ++i) {
            s.push_back(rng.normal());
            neg.push_back(-s.back());
            l.push_back(static_cast<std::uint8_t>(i % 2));
        }
        EXPECT_DOUBLE_EQ(auroc(s, l) + auroc(neg, l), 1.0);
    }
}

TEST(Components, EightConnectivity) {
    // Diagonal neighbours join; the isolated pixel stays separate.
    const std::vector<std::uint8_t> m{1, 0, 0, 0,
                                      0, 1, 0, 1,
                                      0, 0, 0, 0,
                                      1, 1, 0, 0};
    std::size_t n = 0;
    const auto lab = connected_components(m, 4, 4, n);
    EXPECT_EQ(n, 3u);
    EXPECT_EQ(lab[0], 0);
    EXPECT_EQ(lab[5], 0);
    EXPECT_EQ(lab[7], 1);
    EXPECT_EQ(lab[12], 2);
    EXPECT_EQ(lab[13], 2);
    EXPECT_EQ(lab[1], -1);
}

TEST(Aupro, PerfectDetector) {
    const std::vector<std::uint8_t> mask{0, 1, 0, 0, 1, 1, 0, 0, 0};
    const std::vector<double> map(mask.begin(), mask.end());
    for (double limit : {0.1, 0.3, 1.0}) EXPECT_DOUBLE_EQ(aupro(map, mask, 3, 3, limit), 1.0);
}

TEST(Aupro, HandEnumeratedThreeByThree) {
    // One anomalous pixel (centre, score 5). Normal scores 8, 7, 1..6 except 5.
    // Thresholds descending: 8 -> (1/8, 0), 7 -> (2/8, 0), 6 -> (3/8, 0), 5 -> (3/8, 1), ...
    const std::vector<std::uint8_t> mask{0, 0, 0, 0, 1, 0, 0, 0, 0};
    const std::vector<double> map{8, 7, 6, 4, 5, 3, 2, 1, 0};
    // Limit 0.3 lies inside the first two segments, where PRO is 0.
    EXPECT_EQ(aupro(map, mask, 3, 3, 0.3), 0.0);
    // Up to FPR 1: PRO jumps to 1 at FPR 3/8 and stays there; area 5/8.
    EXPECT_DOUBLE_EQ(aupro(map, mask, 3, 3, 1.0), 5.0 / 8.0);
    // Limit 0.5: area from 3/8 to 1/2 = 1/8, normalized by 0.5.
    EXPECT_DOUBLE_EQ(aupro(map, mask, 3, 3, 0.5), 0.25);
    // A tied group straddling the limit is interpolated linearly.
    const std::vector<double> tied{1, 1, 1, 1, 1, 1, 1, 1, 1};
    EXPECT_DOUBLE_EQ(aupro(tied, mask, 3, 3, 0.5), 0.25);
}

TEST(Aupro, MatchesOracle) {
    CounterRng rng(6);
    for (int k = 0; k < 100; ++k) {
        const std::size_t h = 1 + rng.below(8), w = 2 + rng.below(7), n = 1 + rng.below(3);
        std::vector<std::uint8_t> masks(n * h * w);
        std::vector<double> maps(n * h * w);
        for (auto& m : masks) m = rng.uniform() < 0.3;
        masks[0] = 1;
        masks[1] = 0;
        const bool coarse = rng.uniform() < 0.5;
        for (std::size_t p = 0; p < maps.size(); ++p) {
            maps[p] = (coarse ? double(rng.below(5)) : rng.normal()) + (masks[p] ? 0.5 : 0.0);
        }
        const double limit = std::array<double, 3>{0.1, 0.3, 1.0}[rng.below(3)];
        ASSERT_EQ(aupro(maps, masks, h, w, limit), oracle::aupro(maps, masks, h, w, limit)) << k;
    }
}

TEST(Aupro, MonotoneInLimitForAGoodDetector) {
    CounterRng rng(7);
    for (int k = 0; k < 20; ++k) {
        std::vector<std::uint8_t> masks(4 * 64, 0);
        std::vector<double> maps(4 * 64);
        for (std::size_t img = 0; img < 4; ++img) {
            const std::size_t r = rng.below(6), c = rng.below(6);
            for (std::size_t y = r; y < r + 3; ++y) {
                for (std::size_t x = c; x < c + 3; ++x) masks[img * 64 + y * 8 + x] = 1;
            }
        }
        for (std::size_t p = 0; p < maps.size(); ++p) maps[p] = rng.normal() + (masks[p] ? 1.5 : 0.0);
        const double a = aupro(maps, masks, 8, 8, 0.1), b = aupro(maps, masks, 8, 8, 0.3),
                     c = aupro(maps, masks, 8, 8, 1.0);
        EXPECT_LE(a, b);
        EXPECT_LE(b, c);
    }
}

TEST(Aupro, IndependentScoresGiveChanceValue) {
    // Monte-Carlo: with uninformative scores PRO tracks FPR, so the
    // normalized area up to limit L is about L / 2.
    CounterRng rng(8);
    const double limit = 0.3;
    double sum = 0.0;
    const int runs = 20;
    for (int r = 0; r < runs; ++r) {
        std::vector<std::uint8_t> masks(50 * 64, 0);
        std::vector<double> maps(masks.size());
        for (std::size_t img = 0; img < 50; ++img) {
            const std::size_t y0 = rng.below(7), x0 = rng.below(7);
            for (std::size_t y = y0; y < y0 + 2; ++y) {
                for (std::size_t x = x0; x < x0 + 2; ++x) masks[img * 64 + y * 8 + x] = 1;
            }
        }
        for (double& v : maps) v = rng.uniform();
        sum += aupro(maps, masks, 8, 8, limit);
    }
    EXPECT_NEAR(sum / runs, limit / 2, 0.02);
}

TEST(Aupro, Errors) {
    EXPECT_THROW((void)aupro(std::vector<double>(4, 0.0), std::vector<std::uint8_t>(4, 0), 2, 2), UndefinedMetricError);
    EXPECT_THROW((void)aupro(std::vector<double>(4, 0.0), std::vector<std::uint8_t>(4, 1), 2, 2), UndefinedMetricError);
    EXPECT_THROW((void)aupro(std::vector<double>(4, 0.0), std::vector<std::uint8_t>(4, 2), 2, 2), ParameterError);
    EXPECT_THROW((void)aupro(std::vector<double>(5, 0.0), std::vector<std::uint8_t>(5, 0), 2, 2), ShapeError);
    const std::vector<std::uint8_t> m{1, 0, 0, 0};
    EXPECT_THROW((void)aupro(std::vector<double>(4, 0.0), m, 2, 2, 0.0), ParameterError);
}

TEST(EvalReport, MadAveragesPresentMetrics) {
    EvalReport r;
    r.image_auroc = 1.0;
    r.image_ap = 0.5;
    r.image_f1_max = 0.0;
    EXPECT_DOUBLE_EQ(r.mad(), 0.5);
    r.pixel_auroc = r.pixel_ap = r.pixel_f1_max = r.pixel_aupro = 1.0;
    EXPECT_DOUBLE_EQ(r.mad(), 5.5 / 7.0);
}

TEST(Throughput, CountsOnePassAndReportsMedian) {
    int calls = 0;
    const auto r = throughput(
        [&](std::size_t, std::size_t count, NfeCounter& nfe) {
            ++calls;
            nfe.add(3 * count);
        },
        1000, 256, 5);
    EXPECT_EQ(r.nfe, 3000u);
    EXPECT_EQ(r.pass_seconds.size(), 5u);
    EXPECT_EQ(calls, 6 * 4);
    EXPECT_GT(r.samples_per_sec, 0.0);
    EXPECT_THROW((void)throughput([](std::size_t, std::size_t, NfeCounter&) {}, 0, 1, 1), ParameterError);
}
