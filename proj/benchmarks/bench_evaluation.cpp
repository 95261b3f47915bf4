#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "fishpart/evaluation.hpp"
#include "fishpart/random.hpp"

namespace {

struct Scene {
    std::vector<fishpart::DetectionRecord> detections;
    std::vector<fishpart::GroundTruthRecord> truths;
};

Scene make_scene(int images) {
    fishpart::Rng rng(13);
    const char* classes[] = {"head", "fins", "body"};
    Scene s;
    for (int i = 0; i < images; ++i) {
        const std::string id = "img" + std::to_string(i);
        for (int k = 0; k < 4; ++k) {
            const fishpart::BoundingBox b{rng.uniform(20, 500), rng.uniform(20, 250), rng.uniform(10, 40), rng.uniform(10, 40)};
            const char* cls = classes[rng.below(3)];
            s.truths.push_back({id, cls, b, "fish" + std::to_string(i), "ocular"});
            s.detections.push_back({id, cls, {b.cx + rng.uniform(-5, 5), b.cy + rng.uniform(-5, 5), b.w, b.h}, rng.uniform01()});
            s.detections.push_back({id, classes[rng.below(3)], {rng.uniform(20, 500), rng.uniform(20, 250), 20, 20}, rng.uniform01()});
        }
    }
    return s;
}

void BM_Evaluate(benchmark::State& state) {
    const Scene s = make_scene(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fishpart::evaluate(s.detections, s.truths));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.detections.size()));
}
BENCHMARK(BM_Evaluate)->Arg(100)->Arg(1000);

void BM_AveragePrecision(benchmark::State& state) {
    fishpart::Rng rng(14);
    std::vector<fishpart::ScoredDetection> scored(static_cast<std::size_t>(state.range(0)));
    for (auto& d : scored) d = {rng.uniform01(), rng.uniform01() < 0.6};
    for (auto _ : state) benchmark::DoNotOptimize(fishpart::pr_curve_and_ap(scored, scored.size()));
}
BENCHMARK(BM_AveragePrecision)->Arg(1000)->Arg(100000);

}  // namespace
