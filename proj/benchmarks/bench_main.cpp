#include <benchmark/benchmark.h>

#include "bdbridge/counting.hpp"
#include "bdbridge/filters.hpp"
#include "bdbridge/likelihood.hpp"
#include "bdbridge/models.hpp"
#include "bdbridge/observations.hpp"
#include "bdbridge/reference.hpp"
#include "bdbridge/sampler.hpp"

namespace {

using namespace bdbridge;

// Corridor counts as K grows; past 64 jumps the big-integer series takes over.
void BM_CountBridges(benchmark::State& state) {
    const int ups = static_cast<int>(state.range(0));
    const BridgeSpec spec{5, 3, ups, 1.0, 0, 12};
    for (auto _ : state) {
        benchmark::DoNotOptimize(count_bridges(spec).log_count);
    }
    state.SetLabel("K=" + std::to_string(spec.jumps()));
}
BENCHMARK(BM_CountBridges)->Arg(4)->Arg(16)->Arg(31)->Arg(64)->Arg(256);

void BM_DrawBridge(benchmark::State& state) {
    const auto strategy = static_cast<SkeletonStrategy>(state.range(1));
    BridgeSampler sampler({10, 0, static_cast<int>(state.range(0)), 1.0, 0, 31}, {strategy});
    Philox4x32 rng(1, 0);
    BridgePath path;
    for (auto _ : state) {
        sampler.draw(path, rng);
        benchmark::DoNotOptimize(path.states.data());
    }
}
BENCHMARK(BM_DrawBridge)
    ->Args({2, static_cast<int>(SkeletonStrategy::rejection)})
    ->Args({2, static_cast<int>(SkeletonStrategy::sequential)})
    ->Args({10, static_cast<int>(SkeletonStrategy::rejection)})
    ->Args({10, static_cast<int>(SkeletonStrategy::sequential)});

void BM_EstimateLbdi(benchmark::State& state) {
    const auto m = BirthDeathModel::lbdi({0.8, 0.6, 1.2});
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(estimate_pij(m, 5, 5, 1.0, BSet::range(0, 14), n).value);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_EstimateLbdi)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_StraightSis(benchmark::State& state) {
    const auto m = BirthDeathModel::sis({30, 0.003, 1.0});
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(straight_estimate(m, 5, 3, 1.0, n).value);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_StraightSis)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_IgbsFilter(benchmark::State& state) {
    FilterOptions opts;
    opts.replicates = static_cast<std::uint64_t>(state.range(0));
    const Observations obs = shigellosis();
    for (auto _ : state) {
        benchmark::DoNotOptimize(igbs_filter_loglik({199, 0.0016, 0.2607}, obs, 1, opts));
    }
}
BENCHMARK(BM_IgbsFilter)->Arg(1'000)->Arg(10'000)->Unit(benchmark::kMillisecond);

void BM_BootstrapFilter(benchmark::State& state) {
    BootstrapOptions opts;
    opts.particles = static_cast<std::uint64_t>(state.range(0));
    const Observations obs = shigellosis();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bootstrap_filter({199, 0.0016, 0.2607}, obs, 1, opts).loglik);
    }
}
BENCHMARK(BM_BootstrapFilter)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
