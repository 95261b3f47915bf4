#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "fishpart/error.hpp"
#include "fishpart/heatmap.hpp"
#include "fishpart/image_io.hpp"
#include "fishpart/random.hpp"
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

constexpr CanonicalSize kSmall{40, 20};

bool center_inside(const Footprint& f, int x, int y) {
    const double cx = x + 0.5, cy = y + 0.5;
    return cx > f.x0 && cx < f.x1 && cy > f.y0 && cy < f.y1;
}

Footprint random_footprint(Rng& rng, CanonicalSize size) {
    const double x0 = rng.uniform(0, size.width - 1), y0 = rng.uniform(0, size.height - 1);
    return {x0, y0, rng.uniform(x0, size.width), rng.uniform(y0, size.height)};
}

}  // namespace

TEST(Warp, WholeFishFillsTheFrame) {
    const BoundingBox fish = BoundingBox::from_edges(30.5, 12.5, 230.5, 112.5);
    EXPECT_EQ(warp_box_to_canonical(fish, fish), (Footprint{0, 0, 512, 256}));
    const BoundingBox larger = BoundingBox::from_edges(0, 0, 400, 300);
    EXPECT_EQ(warp_box_to_canonical(larger, fish), (Footprint{0, 0, 512, 256}));
}

TEST(Warp, CenteredBoxLandsCentered) {
    const BoundingBox fish = BoundingBox::from_edges(17.5, 9.5, 180.5, 90.5);
    const Footprint f = warp_box_to_canonical({fish.cx, fish.cy, 10, 6}, fish);
    EXPECT_NEAR((f.x0 + f.x1) / 2, 256.0, 1e-12);
    EXPECT_NEAR((f.y0 + f.y1) / 2, 128.0, 1e-12);
}

TEST(Warp, CornersFollowTheComposedMaps) {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const double fx0 = rng.uniform(-50, 50), fy0 = rng.uniform(-50, 50);
        const BoundingBox fish = BoundingBox::from_edges(fx0, fy0, fx0 + rng.uniform(20, 300), fy0 + rng.uniform(10, 150));
        const double bx0 = rng.uniform(fish.x0(), fish.x1() - 1), by0 = rng.uniform(fish.y0(), fish.y1() - 1);
        const BoundingBox box = BoundingBox::from_edges(bx0, by0, rng.uniform(bx0 + 0.5, fish.x1()), rng.uniform(by0 + 0.5, fish.y1()));
        const Affine2 shift{1, 0, -fish.x0(), 0, 1, -fish.y0()};
        const Affine2 scale{512 / fish.w, 0, 0, 0, 256 / fish.h, 0};
        const Affine2 composed = shift.then(scale);
        const Footprint f = warp_box_to_canonical(box, fish);
        const Point2 lo = composed.apply({box.x0(), box.y0()}), hi = composed.apply({box.x1(), box.y1()});
        ASSERT_NEAR(f.x0, lo.x, 1e-9);
        ASSERT_NEAR(f.y0, lo.y, 1e-9);
        ASSERT_NEAR(f.x1, std::min(hi.x, 512.0), 1e-9);
        ASSERT_NEAR(f.y1, std::min(hi.y, 256.0), 1e-9);
        const Point2 direct = box_to_canonical(fish, {}).apply({box.x0(), box.y0()});
        ASSERT_NEAR(direct.x, lo.x, 1e-9);
        ASSERT_NEAR(direct.y, lo.y, 1e-9);
    }
}

TEST(Warp, BoxOutsideTheFishIsRejected) {
    const BoundingBox fish = BoundingBox::from_edges(0, 0, 100, 50);
    EXPECT_EQ(code_of([&] { warp_box_to_canonical(BoundingBox::from_edges(101, 10, 120, 20), fish); }), ErrorCode::OutOfFrame);
    EXPECT_EQ(code_of([&] { warp_box_to_canonical(BoundingBox::from_edges(100, 10, 120, 20), fish); }), ErrorCode::OutOfFrame);
    const Footprint partial = warp_box_to_canonical(BoundingBox::from_edges(90, -10, 120, 20), fish);
    EXPECT_EQ(partial.x1, 512.0);
    EXPECT_EQ(partial.y0, 0.0);
}

TEST(Accumulate, SingleFootprintIsOneInsideZeroOutside) {
    const Footprint f{5.2, 3.0, 17.7, 11.5};
    const std::vector<SidedFootprint> in{{Side::Ocular, f}};
    const auto maps = accumulate_and_normalize(in, kSmall);
    ASSERT_EQ(maps.size(), 1u);
    const Heatmap& m = maps[0];
    EXPECT_EQ(m.side, Side::Ocular);
    for (int y = 0; y < kSmall.height; ++y)
        for (int x = 0; x < kSmall.width; ++x) ASSERT_EQ(m.at(x, y), center_inside(f, x, y) ? 1.0 : 0.0) << x << "," << y;
}

TEST(Accumulate, DisjointEqualFootprintsBothReachOne) {
    const std::vector<SidedFootprint> in{{Side::Ocular, {1, 1, 6, 6}}, {Side::Ocular, {20, 10, 25, 15}}};
    const Heatmap m = accumulate_and_normalize(in, kSmall)[0];
    EXPECT_EQ(m.at(3, 3), 1.0);
    EXPECT_EQ(m.at(22, 12), 1.0);
    EXPECT_EQ(m.at(10, 10), 0.0);
}

TEST(Accumulate, OverlapsAreCountedThenNormalized) {
    const std::vector<SidedFootprint> in{{Side::Ocular, {0, 0, 10, 10}}, {Side::Ocular, {5, 0, 15, 10}}};
    const Heatmap m = accumulate_and_normalize(in, kSmall)[0];
    EXPECT_EQ(m.at(2, 2), 0.5);
    EXPECT_EQ(m.at(7, 2), 1.0);
    EXPECT_EQ(m.at(12, 2), 0.5);
}

TEST(Accumulate, MirroredInputGivesMirroredMap) {
    Rng rng(17);
    std::vector<SidedFootprint> in, mirrored;
    for (int i = 0; i < 25; ++i) {
        const Footprint f = random_footprint(rng, kSmall);
        in.push_back({Side::Ocular, f});
        mirrored.push_back({Side::Ocular, {kSmall.width - f.x1, f.y0, kSmall.width - f.x0, f.y1}});
    }
    const Heatmap a = accumulate_and_normalize(in, kSmall)[0];
    const Heatmap b = accumulate_and_normalize(mirrored, kSmall)[0];
    for (int y = 0; y < kSmall.height; ++y)
        for (int x = 0; x < kSmall.width; ++x) ASSERT_EQ(a.at(x, y), b.at(kSmall.width - 1 - x, y));
}

TEST(Accumulate, OrderDoesNotMatter) {
    Rng rng(18);
    std::vector<SidedFootprint> in;
    for (int i = 0; i < 30; ++i) in.push_back({i % 3 ? Side::Ocular : Side::Blind, random_footprint(rng, kSmall)});
    auto shuffled = in;
    std::reverse(shuffled.begin(), shuffled.end());
    std::swap(shuffled[3], shuffled[17]);
    HeatmapConfig smooth;
    smooth.smooth = true;
    for (const HeatmapConfig& cfg : {HeatmapConfig{}, smooth}) {
        const auto a = accumulate_and_normalize(in, kSmall, cfg);
        const auto b = accumulate_and_normalize(shuffled, kSmall, cfg);
        ASSERT_EQ(a.size(), 2u);
        for (std::size_t s = 0; s < 2; ++s) EXPECT_EQ(a[s].values, b[s].values);
    }
}

TEST(Accumulate, AddingAFootprintNeverLowersACount) {
    Rng rng(19);
    OccurrenceGrid grid(kSmall, Side::Ocular);
    for (int i = 0; i < 40; ++i) {
        const std::vector<double> before = grid.counts;
        grid.add(random_footprint(rng, kSmall));
        for (std::size_t k = 0; k < before.size(); ++k) ASSERT_GE(grid.counts[k], before[k]);
    }
    OccurrenceGrid other(kSmall, Side::Ocular);
    other.add({0, 0, 40, 20});
    const std::vector<double> before = grid.counts;
    grid.merge(other);
    for (std::size_t k = 0; k < before.size(); ++k) EXPECT_EQ(grid.counts[k], before[k] + 1);
}

TEST(Accumulate, SidesAreSeparatedOcularFirst) {
    const std::vector<SidedFootprint> in{{Side::Blind, {0, 0, 4, 4}}, {Side::Ocular, {10, 10, 14, 14}}};
    const auto maps = accumulate_and_normalize(in, kSmall);
    ASSERT_EQ(maps.size(), 2u);
    EXPECT_EQ(maps[0].side, Side::Ocular);
    EXPECT_EQ(maps[1].side, Side::Blind);
    EXPECT_EQ(maps[0].at(1, 1), 0.0);
    EXPECT_EQ(maps[1].at(1, 1), 1.0);
    const std::vector<SidedFootprint> blind_only{{Side::Blind, {0, 0, 4, 4}}};
    const auto one = accumulate_and_normalize(blind_only, kSmall);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].side, Side::Blind);
}

TEST(Accumulate, SmoothedMapStaysInRangeWithPeakOne) {
    Rng rng(20);
    std::vector<SidedFootprint> in;
    for (int i = 0; i < 10; ++i) in.push_back({Side::Ocular, random_footprint(rng, kSmall)});
    HeatmapConfig cfg;
    cfg.smooth = true;
    const Heatmap m = accumulate_and_normalize(in, kSmall, cfg)[0];
    EXPECT_EQ(*std::max_element(m.values.begin(), m.values.end()), 1.0);
    EXPECT_GE(*std::min_element(m.values.begin(), m.values.end()), 0.0);

    const std::vector<SidedFootprint> dot{{Side::Ocular, {20, 10, 21, 11}}};
    const Heatmap spot = accumulate_and_normalize(dot, kSmall, cfg)[0];
    EXPECT_EQ(spot.at(20, 10), 1.0);
    EXPECT_NEAR(spot.at(23, 10), std::exp(-9.0 / 18.0), 1e-12);
    EXPECT_NEAR(spot.at(21, 11), std::exp(-2.0 / 18.0), 1e-12);
}

TEST(Accumulate, EmptyInputIsAnError) {
    EXPECT_EQ(code_of([] { accumulate_and_normalize({}, kSmall); }), ErrorCode::EmptyInput);
    // Footprints too thin to cover any pixel center leave nothing to normalize.
    const std::vector<SidedFootprint> sliver{{Side::Ocular, {3.6, 3.6, 3.9, 3.9}}};
    EXPECT_EQ(code_of([&] { accumulate_and_normalize(sliver, kSmall); }), ErrorCode::EmptyInput);
}

TEST(Output, TextAndImageRenderings) {
    const std::vector<SidedFootprint> in{{Side::Ocular, {0, 0, 2, 1}}, {Side::Ocular, {0, 0, 1, 1}}};
    const Heatmap m = accumulate_and_normalize(in, {3, 2})[0];
    std::ostringstream out;
    write_heatmap_text(out, m);
    EXPECT_EQ(out.str(), "heatmap ocular 3 2\n1 0.5 0\n0 0 0\n");

    support::TempDir dir("heatmap_out");
    write_heatmap_png(dir / "m.png", m);
    const Image img = read_image(dir / "m.png");
    EXPECT_EQ(img.width(), 3);
    EXPECT_EQ(img.height(), 2);
    EXPECT_NE(img.at(0, 0), img.at(2, 1));
    EXPECT_EQ(img.at(2, 0), img.at(2, 1));
    write_heatmap_png(dir / "again.png", m);
    EXPECT_EQ(support::read_bytes(dir / "m.png"), support::read_bytes(dir / "again.png"));
}

TEST(Side, ParseAndPrint) {
    EXPECT_EQ(parse_side("blind"), Side::Blind);
    EXPECT_EQ(to_string(Side::Ocular), "ocular");
    EXPECT_EQ(code_of([] { parse_side("left"); }), ErrorCode::Parse);
}
