// Properties of nets trained with the default settings. Each net is trained
// once per process and shared by the tests below.

#include "irfad/irf.hpp"
#include "irfad/pipeline.hpp"
#include "irfad/trainer.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace irfad;

namespace {

const NoiseSchedule& schedule() {
    static const auto s = NoiseSchedule::linear(ScheduleParams{});
    return s;
}

struct Trained {
    DatasetSplits data;
    NoisePredictor net;
    TrainLog log;
};

Trained fit(DatasetSplits data, std::size_t width, std::uint64_t seed) {
    NetConfig nc;
    nc.input_dim = data.train.sample_dim();
    nc.hidden = {width, width, width};
    TrainConfig tc;
    tc.seed = seed;
    auto result = train(NoisePredictor::create(nc, schedule().params(), seed), data.train, schedule(), tc);
    return {std::move(data), std::move(result.net), std::move(result.log)};
}

const Trained& toy() {
    static const Trained t = fit(gen_toy(0), 128, 0);
    return t;
}

const Trained& blobs() {
    static const Trained t = fit(gen_blobs(BlobConfig{}, 11), 256, 11);
    return t;
}

double median(std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
    return v[v.size() / 2];
}

} // namespace

TEST(ToyReference, TrainingLossFallsBelowUnitVariance) {
    EXPECT_LT(toy().log.final_loss(), 1.05);
    EXPECT_LT(toy().log.final_loss(), toy().log.epoch_loss.front());
}

TEST(ToyReference, MeanPathResponseIsLargerOffTheMode) {
    const auto& t = toy();
    ScorerConfig c;
    c.t = 250;
    NfeCounter nfe;
    const Tensor f = irf_fields(t.net, schedule(), t.data.test, c, nfe);
    std::vector<double> normal, abnormal;
    double normal_sum = 0.0;
    for (std::size_t i = 0; i < t.data.test.size(); ++i) {
        (t.data.test.label(i) == Label::normal ? normal : abnormal).push_back(std::abs(f[i]));
        if (t.data.test.label(i) == Label::normal) normal_sum += f[i];
    }
    EXPECT_GT(median(abnormal), median(normal));
    EXPECT_LE(std::abs(normal_sum / double(normal.size())), 0.1);
}

TEST(ToyReference, BaselinesRankAbnormalHigherOnAverage) {
    const auto& t = toy();
    ScorerConfig c;
    c.kind = ScorerKind::recon;
    c.recon_steps = 10;
    const ScoreSet r = score_dataset(t.net, schedule(), t.data.test, c);
    double normal = 0.0, abnormal = 0.0;
    for (std::size_t i = 0; i < r.scores.size(); ++i) {
        (t.data.test.label(i) == Label::normal ? normal : abnormal) += r.scores[i];
    }
    EXPECT_GT(abnormal, normal);

    c.kind = ScorerKind::ddim;
    const EvalReport d = evaluate(score_dataset(t.net, schedule(), t.data.test, c), t.data.test);
    EXPECT_GE(*d.image_auroc, 0.0);
    EXPECT_LE(*d.image_auroc, 1.0);
}

TEST(BlobReference, MapsPeakInsideTheMask) {
    const auto& b = blobs();
    const ScoreSet s = score_dataset(b.net, schedule(), b.data.test, ScorerConfig{});
    const std::size_t area = s.map_height * s.map_width;
    std::size_t abnormal = 0, hit = 0;
    for (std::size_t i = 0; i < b.data.test.size(); ++i) {
        if (b.data.test.label(i) != Label::abnormal) continue;
        ++abnormal;
        const auto mask = b.data.test.mask(i);
        double in = 0.0, out = 0.0;
        std::size_t n_in = 0;
        for (std::size_t p = 0; p < area; ++p) {
            const double v = s.maps[i * area + p];
            if (mask[p]) {
                in += v;
                ++n_in;
            } else {
                out += v;
            }
        }
        if (in / double(n_in) > out / double(area - n_in)) ++hit;
    }
    EXPECT_GE(double(hit), 0.95 * double(abnormal));
}

TEST(BlobReference, ThroughputFollowsEvaluationCount) {
    const auto& b = blobs();
    ScorerConfig irf, ddim, recon;
    ddim.kind = ScorerKind::ddim;
    recon.kind = ScorerKind::recon;
    recon.recon_steps = 10;
    const double a = measure_throughput(b.net, schedule(), b.data.test, irf, 3).samples_per_sec;
    const double d = measure_throughput(b.net, schedule(), b.data.test, ddim, 3).samples_per_sec;
    const double r = measure_throughput(b.net, schedule(), b.data.test, recon, 3).samples_per_sec;
    EXPECT_GT(a, d);
    EXPECT_GT(d, r);
}
