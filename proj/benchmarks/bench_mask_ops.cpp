#include <benchmark/benchmark.h>

#include "fishpart/mask_ops.hpp"
#include "fishpart/synthetic.hpp"

namespace {

fishpart::SyntheticFish tilted_fish() {
    fishpart::SyntheticConfig cfg;
    cfg.rotation_deg = 30.0;
    return fishpart::make_synthetic_fish(11, cfg);
}

void BM_ShapeStats(benchmark::State& state) {
    const auto fish = tilted_fish();
    for (auto _ : state) benchmark::DoNotOptimize(fishpart::shape_stats(fish.mask));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(fish.mask.count()));
}
BENCHMARK(BM_ShapeStats);

void BM_AlignHorizontal(benchmark::State& state) {
    const auto fish = tilted_fish();
    for (auto _ : state) benchmark::DoNotOptimize(fishpart::align_horizontal(fish.image, fish.mask));
}
BENCHMARK(BM_AlignHorizontal)->Unit(benchmark::kMillisecond);

}  // namespace
