#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "fishpart/augmentation.hpp"
#include "fishpart/error.hpp"
#include "fishpart/filters.hpp"
#include "fishpart/random.hpp"
#include "fishpart/synthetic.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace fishpart;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

BinaryMask filled(int w, int h, int x0, int y0, int x1, int y1) {
    BinaryMask m(w, h);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) m.set(x, y);
    return m;
}

Image uniform_image(int w, int h, Rgb c) {
    Image img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) img.set(x, y, c);
    return img;
}

Image noisy_image(int w, int h, Rgb base, int spread, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            Rgb c{};
            for (std::size_t k = 0; k < 3; ++k) c[k] = static_cast<std::uint8_t>(base[k] + rng.between(-spread, spread));
            img.set(x, y, c);
        }
    }
    return img;
}

TargetFish rectangle_fish(int w, int h, Image image) {
    return {"fish", std::move(image), filled(w, h, 0, 0, w - 1, h - 1), std::nullopt};
}

PatchRecord full_patch(Image image) {
    const int w = image.width(), h = image.height();
    return {"patch", std::move(image), filled(w, h, 0, 0, w - 1, h - 1)};
}

AugmentationPlan plan_at(int x, int y, double scale = 1.0) { return {"patch", "fish", x, y, scale, 1}; }

std::array<double, 3> channel_means(const Image& img, const BinaryMask& where, int ox = 0, int oy = 0) {
    std::array<double, 3> sum{};
    double n = 0;
    for (int y = 0; y < where.height(); ++y) {
        for (int x = 0; x < where.width(); ++x) {
            if (!where.at(x, y)) continue;
            const Rgb c = img.at(x + ox, y + oy);
            for (std::size_t k = 0; k < 3; ++k) sum[k] += c[k];
            ++n;
        }
    }
    for (double& s : sum) s /= n;
    return sum;
}

}  // namespace

TEST(Placement, PatchLargerThanFishIsInfeasible) {
    const TargetFish fish = rectangle_fish(10, 10, uniform_image(10, 10, {100, 80, 60}));
    const PatchRecord patch = full_patch(uniform_image(20, 20, {200, 0, 0}));
    EXPECT_EQ(code_of([&] { sample_placement(patch, fish, 1); }), ErrorCode::PlacementInfeasible);
}

TEST(Placement, TinyPatchOnRectangleFitsAtOnce) {
    const TargetFish fish = rectangle_fish(200, 100, uniform_image(200, 100, {100, 80, 60}));
    const PatchRecord patch = full_patch(uniform_image(6, 6, {200, 0, 0}));
    AugmentConfig cfg;
    cfg.max_retries = 1;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const AugmentationPlan plan = sample_placement(patch, fish, seed, cfg);
        EXPECT_GE(plan.scale, 0.8);
        EXPECT_LE(plan.scale, 1.2);
        const ScaledPatch s = scale_patch(patch, plan.scale);
        const PatchOrigin o = patch_origin(plan, s.fg.width(), s.fg.height());
        for (int y = 0; y < s.fg.height(); ++y)
            for (int x = 0; x < s.fg.width(); ++x)
                if (s.fg.at(x, y)) ASSERT_TRUE(fish.mask.at_or_false(o.x + x, o.y + y));
    }
}

TEST(Placement, DeterministicAndContainedOnSyntheticFish) {
    const SyntheticFish sf = make_synthetic_fish(3, {});
    const TargetFish fish{"fish", sf.image, sf.mask, sf.parts};
    const PatchRecord patch = make_disease_patch(4, 24, "patch");
    std::vector<double> scales;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const AugmentationPlan plan = sample_placement(patch, fish, seed);
        ASSERT_EQ(plan, sample_placement(patch, fish, seed));
        scales.push_back(plan.scale);
        if (seed % 100 == 0) {
            const ScaledPatch s = scale_patch(patch, plan.scale);
            const PatchOrigin o = patch_origin(plan, s.fg.width(), s.fg.height());
            for (int y = 0; y < s.fg.height(); ++y)
                for (int x = 0; x < s.fg.width(); ++x)
                    if (s.fg.at(x, y)) ASSERT_TRUE(fish.mask.at_or_false(o.x + x, o.y + y));
        }
    }
    EXPECT_LT(oracle::ks_uniform(scales, 0.8, 1.2), 1.628 / std::sqrt(2000.0));
}

TEST(ScalePatch, UnitScaleIsIdentity) {
    const PatchRecord patch = full_patch(noisy_image(17, 13, {120, 120, 120}, 40, 2));
    const ScaledPatch s = scale_patch(patch, 1.0);
    EXPECT_EQ(s.image, patch.image);
    EXPECT_EQ(s.fg, patch.fg_mask);
}

TEST(Harmonize, MatchingStatisticsLeavePatchUnchanged) {
    // Checkerboards of the same two colors on both sides.
    const Rgb a{150, 100, 60}, b{170, 115, 80};
    Image fish_img(120, 120), patch_img(30, 30);
    for (int y = 0; y < 120; ++y)
        for (int x = 0; x < 120; ++x) fish_img.set(x, y, (x + y) % 2 ? a : b);
    for (int y = 0; y < 30; ++y)
        for (int x = 0; x < 30; ++x) patch_img.set(x, y, (x + y) % 2 ? a : b);
    const TargetFish fish = rectangle_fish(120, 120, fish_img);
    const PatchRecord patch = full_patch(patch_img);
    const Image out = harmonize_colors(patch, fish, plan_at(60, 60));
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
            for (std::size_t k = 0; k < 3; ++k)
                ASSERT_LE(std::abs(out.at(x, y)[k] - patch_img.at(x, y)[k]), 1) << x << "," << y;
        }
    }
}

TEST(Harmonize, GrayPatchTakesOnTheFishColor) {
    for (int spread : {0, 12}) {
        const TargetFish fish = rectangle_fish(160, 120, noisy_image(160, 120, {140, 90, 45}, spread, 9));
        const PatchRecord patch = full_patch(noisy_image(24, 20, {128, 128, 128}, 30, 10));
        const AugmentationPlan plan = plan_at(80, 60);
        const Image out = harmonize_colors(patch, fish, plan);
        const ScaledPatch scaled = scale_patch(patch, 1.0);
        const PatchOrigin o = patch_origin(plan, 24, 20);
        const BinaryMask ring = harmonization_ring(fish, scaled, o, 8);
        const auto want = channel_means(fish.image, ring);
        const auto got = channel_means(out, scaled.fg);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(got[k] / want[k], 1.0, 0.02) << "spread " << spread;
    }
}

TEST(Harmonize, FlatPatchMapsToTheRingMean) {
    const TargetFish fish = rectangle_fish(160, 120, noisy_image(160, 120, {140, 90, 45}, 15, 11));
    const PatchRecord patch = full_patch(uniform_image(20, 20, {128, 128, 128}));
    const AugmentationPlan plan = plan_at(70, 50);
    const Image out = harmonize_colors(patch, fish, plan);
    const BinaryMask ring = harmonization_ring(fish, scale_patch(patch, 1.0), patch_origin(plan, 20, 20), 8);
    const auto want = channel_means(fish.image, ring);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            for (std::size_t k = 0; k < 3; ++k) ASSERT_LE(std::abs(out.at(x, y)[k] - want[k]), 1.0);
}

TEST(Harmonize, RingIsABandAroundTheFootprint) {
    const TargetFish fish = rectangle_fish(100, 100, uniform_image(100, 100, {1, 2, 3}));
    const PatchRecord patch = full_patch(uniform_image(10, 10, {0, 0, 0}));
    const ScaledPatch s = scale_patch(patch, 1.0);
    const BinaryMask ring = harmonization_ring(fish, s, {40, 40}, 8);
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 100; ++x) {
            const int dx = std::max({40 - x, 0, x - 49}), dy = std::max({40 - y, 0, y - 49});
            const bool inside = dx == 0 && dy == 0;
            ASSERT_EQ(ring.at(x, y), !inside && dx * dx + dy * dy <= 64) << x << "," << y;
        }
    }
}

TEST(Harmonize, NoFishAroundThePatchIsAnError) {
    const TargetFish fish = rectangle_fish(10, 10, uniform_image(10, 10, {90, 60, 30}));
    const PatchRecord patch = full_patch(uniform_image(10, 10, {128, 128, 128}));
    EXPECT_EQ(code_of([&] { harmonize_colors(patch, fish, plan_at(5, 5)); }), ErrorCode::EmptyRing);
}

TEST(Matte, KernelIsNormalized) {
    const auto k = gaussian_kernel_5x5(0.5);
    double sum = 0;
    for (double v : k) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-6);
    EXPECT_NEAR(k[12], 0.619, 5e-4);
}

TEST(Matte, ConstantMaskStaysOne) {
    const Matte m = blur_boundary(filled(20, 16, 0, 0, 19, 15));
    for (int y = 2; y < 14; ++y)
        for (int x = 2; x < 18; ++x) EXPECT_NEAR(m.at(x, y), 1.0, 1e-12);
    EXPECT_LT(m.at(0, 0), 1.0);
}

TEST(Matte, TransitionBandIsNarrow) {
    const Matte m = blur_boundary(filled(30, 30, 10, 10, 19, 19));
    const auto k = gaussian_kernel_5x5(0.5);
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 30; ++x) {
            double want = 0;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    const int sx = x + dx, sy = y + dy;
                    if (sx >= 10 && sx <= 19 && sy >= 10 && sy <= 19) want += k[static_cast<std::size_t>((dy + 2) * 5 + dx + 2)];
                }
            ASSERT_NEAR(m.at(x, y), want, 1e-12);
        }
    }
    EXPECT_GT(m.at(10, 15), 0.5);
    EXPECT_LT(m.at(9, 15), 0.5);
    EXPECT_EQ(m.at(7, 15), 0.0);
}

TEST(Composite, OpaqueMatteCopiesThePatch) {
    const TargetFish fish = rectangle_fish(50, 40, noisy_image(50, 40, {100, 100, 100}, 20, 1));
    const Image patch = noisy_image(10, 8, {200, 50, 50}, 20, 2);
    Matte opaque{10, 8, std::vector<double>(80, 1.0)};
    const AugmentationPlan plan = plan_at(20, 20);
    const AugmentedSample s = composite(fish, patch, opaque, plan);
    const PatchOrigin o = patch_origin(plan, 10, 8);
    for (int y = 0; y < 40; ++y) {
        for (int x = 0; x < 50; ++x) {
            const bool in = x >= o.x && x < o.x + 10 && y >= o.y && y < o.y + 8;
            ASSERT_EQ(s.image.at(x, y), in ? patch.at(x - o.x, y - o.y) : fish.image.at(x, y));
        }
    }
    EXPECT_EQ(s.gt_box, BoundingBox::from_edges(o.x - 0.5, o.y - 0.5, o.x + 9.5, o.y + 7.5));
    EXPECT_EQ(s.part_class, "disease");
    EXPECT_EQ(s.provenance, plan);
}

TEST(Composite, TransparentMatteLeavesTheFish) {
    const TargetFish fish = rectangle_fish(50, 40, noisy_image(50, 40, {100, 100, 100}, 20, 1));
    Matte clear{10, 8, std::vector<double>(80, 0.0)};
    clear.alpha[0] = 0.6;  // keeps a box defined
    const AugmentedSample s = composite(fish, noisy_image(10, 8, {10, 10, 10}, 5, 3), clear, plan_at(25, 20));
    int changed = 0;
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 50; ++x) changed += s.image.at(x, y) != fish.image.at(x, y);
    EXPECT_LE(changed, 1);

    Matte zero{10, 8, std::vector<double>(80, 0.0)};
    EXPECT_EQ(code_of([&] { composite(fish, noisy_image(10, 8, {10, 10, 10}, 5, 3), zero, plan_at(25, 20)); }),
              ErrorCode::GeometryError);
}

TEST(Composite, BoxIsTheTightBoxOfTheThresholdedMatte) {
    Rng rng(77);
    const TargetFish fish = rectangle_fish(80, 70, noisy_image(80, 70, {90, 90, 90}, 10, 4));
    for (int trial = 0; trial < 30; ++trial) {
        const BinaryMask fg = oracle::random_blob_mask(rng, 21, 17);
        if (fg.count() == 0) continue;
        const Matte m = blur_boundary(fg);
        const AugmentationPlan plan = plan_at(static_cast<int>(rng.between(15, 65)), static_cast<int>(rng.between(15, 55)));
        const AugmentedSample s = composite(fish, noisy_image(21, 17, {200, 40, 40}, 10, 5), m, plan);
        const PatchOrigin o = patch_origin(plan, 21, 17);
        int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
        for (int y = 0; y < 17; ++y)
            for (int x = 0; x < 21; ++x)
                if (m.at(x, y) > 0.5) {
                    x0 = std::min(x0, x + o.x);
                    x1 = std::max(x1, x + o.x);
                    y0 = std::min(y0, y + o.y);
                    y1 = std::max(y1, y + o.y);
                }
        EXPECT_EQ(s.gt_box, BoundingBox::from_edges(x0 - 0.5, y0 - 0.5, x1 + 0.5, y1 + 0.5));
    }
}

TEST(ApplyPlan, OnlyTheFootprintChangesAndPartIsAssigned) {
    const SyntheticFish sf = make_synthetic_fish(21, {});
    const TargetFish fish{"fish", sf.image, sf.mask, sf.parts};
    const PatchRecord patch = make_disease_patch(22, 28, "patch");
    const AugmentationPlan plan = sample_placement(patch, fish, 5);
    const AugmentedSample s = apply_plan(patch, fish, plan);
    const ScaledPatch scaled = scale_patch(patch, plan.scale);
    const PatchOrigin o = patch_origin(plan, scaled.image.width(), scaled.image.height());
    for (int y = 0; y < fish.image.height(); ++y) {
        for (int x = 0; x < fish.image.width(); ++x) {
            const bool in = x >= o.x && x < o.x + scaled.image.width() && y >= o.y && y < o.y + scaled.image.height();
            if (!in) ASSERT_EQ(s.image.at(x, y), fish.image.at(x, y));
        }
    }
    EXPECT_EQ(s.part_class, to_string(assign_box_to_part(s.gt_box, *fish.parts)));
    EXPECT_EQ(s.image, apply_plan(patch, fish, plan).image);
    AugmentationPlan wrong = plan;
    wrong.fish_id = "other";
    EXPECT_EQ(code_of([&] { apply_plan(patch, fish, wrong); }), ErrorCode::InvalidArgument);
}

TEST(Combinations, ExactProducts) {
    EXPECT_EQ(combination_count(462, 59, 1), 27258u);
    EXPECT_EQ(combination_count(0, 59, 3), 0u);
    EXPECT_EQ(combination_count(0, ~0ull, ~0ull), 0u);
    EXPECT_EQ(combination_count(3, 4, 5), 60u);
    EXPECT_EQ(combination_count(1ull << 32, 1ull << 31, 1), 1ull << 63);
    EXPECT_EQ(code_of([] { combination_count(1ull << 32, 1ull << 32, 1); }), ErrorCode::Overflow);
    EXPECT_EQ(code_of([] { combination_count(1ull << 32, 1ull << 31, 2); }), ErrorCode::Overflow);
}

TEST(Manifest, EmptyRoundTrip) {
    support::TempDir dir("manifest_empty");
    write_manifest(dir / "m.jsonl", {});
    EXPECT_TRUE(read_manifest(dir / "m.jsonl").empty());
}

TEST(Manifest, LargeRoundTripIsLossless) {
    Rng rng(4773);
    std::vector<ManifestRecord> records;
    for (int i = 0; i < 4773; ++i) {
        ManifestRecord r;
        r.sample_id = "sample_" + std::to_string(i);
        r.image_path = "images/" + r.sample_id + ".png";
        r.plan = {"patch_" + std::to_string(rng.below(462)), "fish_" + std::to_string(rng.below(59)),
                  static_cast<int>(rng.between(0, 600)), static_cast<int>(rng.between(0, 300)), rng.uniform(0.8, 1.2),
                  rng.next()};
        r.gt_box = {rng.uniform(0, 600), rng.uniform(0, 300), rng.uniform(1, 40), rng.uniform(1, 40)};
        r.part_class = i % 3 == 0 ? "head" : i % 3 == 1 ? "fins" : "body";
        records.push_back(r);
    }
    support::TempDir dir("manifest_large");
    write_manifest(dir / "m.jsonl", records);
    const auto back = read_manifest(dir / "m.jsonl");
    EXPECT_EQ(back, records);
    write_manifest(dir / "again.jsonl", back);
    EXPECT_EQ(support::read_bytes(dir / "m.jsonl"), support::read_bytes(dir / "again.jsonl"));
}

TEST(Manifest, MalformedLinesReportContext) {
    try {
        parse_manifest_line(R"({"sample_id":"a","anchor":[1]})", "m.jsonl:3");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Parse);
        EXPECT_NE(std::string(e.what()).find("m.jsonl:3"), std::string::npos);
    }
    EXPECT_EQ(code_of([] { parse_manifest_line("not json", "x"); }), ErrorCode::Parse);
    EXPECT_EQ(code_of([] { read_manifest("/nonexistent/m.jsonl"); }), ErrorCode::Io);
}
