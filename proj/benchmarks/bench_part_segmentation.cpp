#include <benchmark/benchmark.h>

#include "fishpart/part_segmentation.hpp"
#include "fishpart/synthetic.hpp"

namespace {

void BM_SegmentParts(benchmark::State& state) {
    fishpart::SyntheticConfig cfg;
    cfg.profile = state.range(0) == 0 ? fishpart::BodyProfile::Flatfish : fishpart::BodyProfile::Fusiform;
    const auto fish = fishpart::make_synthetic_fish(12, cfg);
    for (auto _ : state) benchmark::DoNotOptimize(fishpart::segment_parts(fish.mask, fish.head_side, cfg.profile));
}
BENCHMARK(BM_SegmentParts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
