#include "irfad/pipeline.hpp"
#include "irfad/rng.hpp"

#include <benchmark/benchmark.h>

using namespace irfad;

namespace {

struct Fixture {
    NoiseSchedule schedule = NoiseSchedule::linear(ScheduleParams{});
    DatasetSplits data = [] {
        BlobConfig b;
        b.n_train = 2;
        b.n_test = 256;
        return gen_blobs(b, 1);
    }();
    NoisePredictor net = [] {
        NetConfig nc;
        nc.input_dim = 256;
        nc.hidden = {256, 256, 256};
        return NoisePredictor::create(nc, ScheduleParams{}, 1);
    }();
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void run_scorer(benchmark::State& state, ScorerConfig cfg) {
    const auto& f = fixture();
    for (auto _ : state) {
        const ScoreSet s = score_dataset(f.net, f.schedule, f.data.test, cfg);
        benchmark::DoNotOptimize(s.scores.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.data.test.size()));
}

void BM_IrfMean(benchmark::State& state) { run_scorer(state, ScorerConfig{}); }

void BM_Ddim(benchmark::State& state) {
    ScorerConfig c;
    c.kind = ScorerKind::ddim;
    c.ddim_steps = static_cast<int>(state.range(0));
    run_scorer(state, c);
}

void BM_Recon(benchmark::State& state) {
    ScorerConfig c;
    c.kind = ScorerKind::recon;
    c.recon_steps = static_cast<int>(state.range(0));
    run_scorer(state, c);
}

std::pair<std::vector<double>, std::vector<std::uint8_t>> ranking_input(std::size_t n) {
    CounterRng rng(2);
    std::vector<double> s(n);
    std::vector<std::uint8_t> l(n);
    for (std::size_t i = 0; i < n; ++i) {
        l[i] = static_cast<std::uint8_t>(rng.below(2));
        s[i] = rng.normal() + l[i];
    }
    return {s, l};
}

void BM_Auroc(benchmark::State& state) {
    const auto [s, l] = ranking_input(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(auroc(s, l));
}

void BM_Aupro(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<std::uint8_t> masks(n * 32 * 32, 0);
    std::vector<double> maps(masks.size());
    CounterRng rng(3);
    for (std::size_t img = 0; img < n; ++img) {
        const std::size_t y0 = rng.below(24), x0 = rng.below(24);
        for (std::size_t y = y0; y < y0 + 8; ++y) {
            for (std::size_t x = x0; x < x0 + 8; ++x) masks[img * 1024 + y * 32 + x] = 1;
        }
    }
    for (std::size_t p = 0; p < maps.size(); ++p) maps[p] = rng.normal() + masks[p];
    for (auto _ : state) benchmark::DoNotOptimize(aupro(maps, masks, 32, 32));
}

} // namespace

BENCHMARK(BM_IrfMean)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ddim)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Recon)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Auroc)->Arg(1000)->Arg(100000);
BENCHMARK(BM_Aupro)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
