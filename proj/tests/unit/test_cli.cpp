#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "fishpart/image_io.hpp"
#include "temp_dir.hpp"

using namespace fishpart;
using support::run_cli;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const fs::path& path) {
    const auto bytes = support::read_bytes(path);
    return {bytes.begin(), bytes.end()};
}

std::vector<double> heatmap_values(const fs::path& path) {
    std::istringstream in(read_text(path));
    std::string tag, side;
    int w = 0, h = 0;
    in >> tag >> side >> w >> h;
    std::vector<double> v(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (double& x : v) in >> x;
    return v;
}

std::size_t count_files(const fs::path& dir, const std::string& suffix) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        n += name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    }
    return n;
}

}  // namespace

TEST(Config, TextRoundTrip) {
    cli::PipelineConfig c;
    c.apply({{"align.margin", "0.07"}, {"partseg.profile", "fusiform"}, {"augment.count", "12"},
             {"eval.iou_threshold", "0.6"}, {"heatmap.smooth", "true"}, {"seed", "99"}, {"paths.input", "/a/b"}});
    const cli::PipelineConfig back = [&] {
        cli::PipelineConfig r;
        r.apply(cli::PipelineConfig::parse_text(c.to_text(), "round"));
        return r;
    }();
    EXPECT_TRUE(back == c);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.augment_count, 12u);
    EXPECT_EQ(back.path("input"), fs::path("/a/b"));
}

TEST(Config, FlagsOverrideFileOverridesDefaults) {
    support::TempDir dir("cli_config");
    write_text(dir / "run.cfg", "# pipeline\nalign.margin = 0.1   # wider crop\njobs = 2\n");
    const auto defaults = run_cli({"--print-config", "align"});
    EXPECT_NE(defaults.out.find("align.margin = 0.02\n"), std::string::npos);
    const auto from_file = run_cli({"--config", (dir / "run.cfg").string(), "--print-config", "align"});
    EXPECT_NE(from_file.out.find("align.margin = 0.1\n"), std::string::npos);
    EXPECT_NE(from_file.out.find("jobs = 2\n"), std::string::npos);
    const auto flagged = run_cli({"--config", (dir / "run.cfg").string(), "--print-config", "align", "--margin", "0.05"});
    EXPECT_EQ(flagged.code, 0);
    EXPECT_NE(flagged.out.find("align.margin = 0.05\n"), std::string::npos);
    EXPECT_NE(flagged.out.find("jobs = 2\n"), std::string::npos);
}

TEST(Config, BadValuesAreUsageErrors) {
    support::TempDir dir("cli_bad_config");
    write_text(dir / "unknown.cfg", "align.wobble = 3\n");
    write_text(dir / "range.cfg", "augment.scale_min = 1.5\n");
    write_text(dir / "syntax.cfg", "just words\n");
    for (const char* name : {"unknown.cfg", "range.cfg", "syntax.cfg"}) {
        EXPECT_EQ(run_cli({"--config", (dir / name).string(), "--print-config", "align"}).code, 2) << name;
    }
    EXPECT_EQ(run_cli({"align", "--margin", "-1"}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
}

TEST(Config, AugmentNeedsASeed) {
    support::TempDir dir("cli_seed");
    const auto r = run_cli({"augment", "--patches", dir.str(), "--fish", dir.str(), "-o", (dir / "out").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("seed"), std::string::npos);
}

class Pipeline : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new support::TempDir("cli_pipeline");
        const auto r = run_cli({"synth", "-o", p("synth"), "--seed", "3", "-n", "3", "--patches", "3", "--max-rotation", "40",
                                "--head", "random"});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static std::string p(const std::string& name) { return (*dir_ / name).string(); }
    static support::TempDir* dir_;
};

support::TempDir* Pipeline::dir_ = nullptr;

TEST_F(Pipeline, AlignWritesOneCropPerFishAndIsRepeatable) {
    const auto r = run_cli({"align", "-i", p("synth"), "-o", p("aligned_a")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(count_files(p("aligned_a"), ".align.txt"), 3u);
    EXPECT_EQ(count_files(p("aligned_a"), "_mask.png"), 3u);
    ASSERT_EQ(run_cli({"align", "-i", p("synth"), "-o", p("aligned_b"), "-j", "2"}).code, 0);
    EXPECT_EQ(support::snapshot(p("aligned_a")), support::snapshot(p("aligned_b")));
}

TEST_F(Pipeline, AlignReportsDegenerateShapesAndContinues) {
    fs::create_directories(p("mixed"));
    fs::copy_file(p("synth") + "/fish_0000.png", p("mixed") + "/good.png");
    fs::copy_file(p("synth") + "/fish_0000_mask.png", p("mixed") + "/good_mask.png");
    BinaryMask disc(60, 60);
    Image img(60, 60);
    for (int y = 0; y < 60; ++y)
        for (int x = 0; x < 60; ++x)
            if ((x - 30) * (x - 30) + (y - 30) * (y - 30) <= 400) disc.set(x, y);
    write_image(p("mixed") + "/round.png", img);
    write_mask(p("mixed") + "/round_mask.png", disc);
    const auto r = run_cli({"align", "-i", p("mixed"), "-o", p("mixed_out")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("DegenerateShape"), std::string::npos) << r.err;
    EXPECT_TRUE(fs::exists(p("mixed_out") + "/good.png"));
    EXPECT_FALSE(fs::exists(p("mixed_out") + "/round.png"));
}

TEST_F(Pipeline, PartsCoverExactlyTheForeground) {
    ASSERT_EQ(run_cli({"align", "-i", p("synth"), "-o", p("aligned")}).code, 0);
    const auto r = run_cli({"partseg", "-i", p("aligned"), "-o", p("parts")});
    ASSERT_EQ(r.code, 0) << r.err;
    for (int i = 0; i < 3; ++i) {
        const std::string id = "fish_000" + std::to_string(i);
        const BinaryMask mask = read_mask(p("aligned") + "/" + id + "_mask.png");
        int w = 0, h = 0;
        const auto labels = read_gray(p("parts") + "/" + id + "_parts.png", w, h);
        ASSERT_EQ(w, mask.width());
        ASSERT_EQ(h, mask.height());
        std::array<std::size_t, 4> counts{};
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::uint8_t v = labels[static_cast<std::size_t>(y * w + x)];
                ASSERT_LE(v, 3);
                ASSERT_EQ(v != 0, mask.at(x, y));
                ++counts[v];
            }
        EXPECT_GT(counts[1], 0u);
        EXPECT_GT(counts[2], 0u);
        EXPECT_GT(counts[3], 0u);
        EXPECT_TRUE(fs::exists(p("parts") + "/" + id + ".parts.txt"));
        EXPECT_TRUE(fs::exists(p("parts") + "/" + id + "_overlay.png"));
    }
}

TEST_F(Pipeline, FusiformProfileRuns) {
    ASSERT_EQ(run_cli({"synth", "-o", p("salmon"), "--seed", "4", "-n", "2", "--profile", "fusiform"}).code, 0);
    ASSERT_EQ(run_cli({"align", "-i", p("salmon"), "-o", p("salmon_aligned")}).code, 0);
    const auto r = run_cli({"partseg", "-i", p("salmon_aligned"), "-o", p("salmon_parts"), "--profile", "fusiform"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(read_text(p("salmon_parts") + "/fish_0000.parts.txt").find("fusiform"), std::string::npos);
}

TEST_F(Pipeline, MissingInputDirectoryFails) {
    EXPECT_NE(run_cli({"partseg", "-i", p("nowhere"), "-o", p("nowhere_out")}).code, 0);
    EXPECT_NE(run_cli({"align", "-i", p("nowhere"), "-o", p("nowhere_out")}).code, 0);
}

TEST_F(Pipeline, AugmentIsReproducibleAndRegenerable) {
    ASSERT_EQ(run_cli({"align", "-i", p("synth"), "-o", p("aug_fish")}).code, 0);
    const std::vector<std::string> base{"augment", "--patches", p("synth") + "/patches", "--fish", p("aug_fish"),
                                        "-n", "10", "--seed", "7"};
    auto first = base, second = base;
    first.insert(first.end(), {"-o", p("aug1")});
    second.insert(second.end(), {"-o", p("aug2"), "-j", "3"});
    ASSERT_EQ(run_cli(first).code, 0);
    ASSERT_EQ(run_cli(second).code, 0);
    const auto snap = support::snapshot(p("aug1"));
    EXPECT_EQ(snap, support::snapshot(p("aug2")));
    EXPECT_EQ(count_files(p("aug1") + "/images", ".png"), 10u);
    const auto regen = run_cli({"augment", "--patches", p("synth") + "/patches", "--fish", p("aug_fish"), "--from-manifest",
                                p("aug1") + "/manifest.jsonl", "-o", p("aug3"), "--seed", "7"});
    ASSERT_EQ(regen.code, 0) << regen.err;
    EXPECT_EQ(snap, support::snapshot(p("aug3")));
}

TEST_F(Pipeline, AugmentReportsShortfall) {
    ASSERT_EQ(run_cli({"align", "-i", p("synth"), "-o", p("short_fish")}).code, 0);
    ASSERT_EQ(run_cli({"synth", "-o", p("huge"), "--seed", "5", "-n", "1", "--patches", "2", "--patch-size", "400"}).code, 0);
    const auto r = run_cli({"augment", "--patches", p("huge") + "/patches", "--fish", p("short_fish"), "-n", "5",
                            "--seed", "1", "-o", p("short_out")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("shortfall"), std::string::npos) << r.err;
}

TEST(Eval, FixtureFiles) {
    support::TempDir dir("cli_eval");
    write_text(dir / "gt.txt", "img1 head 10 10 4 4 fishA\nimg1 body 30 10 8 6 fishA\nimg2 fins 5 5 2 2 fishB\n");
    write_text(dir / "perfect.txt", "img1 head 10 10 4 4 0.9\nimg1 body 30 10 8 6 0.8\nimg2 fins 5 5 2 2 0.7\n");
    write_text(dir / "empty.txt", "");
    const auto perfect = run_cli({"eval", "-d", (dir / "perfect.txt").string(), "-g", (dir / "gt.txt").string(),
                                  "-o", (dir / "report.txt").string()});
    ASSERT_EQ(perfect.code, 0) << perfect.err;
    EXPECT_NE(perfect.out.find("map 1.0000000000\n"), std::string::npos) << perfect.out;
    EXPECT_EQ(read_text(dir / "report.txt"), perfect.out);

    const auto none = run_cli({"eval", "-d", (dir / "empty.txt").string(), "-g", (dir / "gt.txt").string()});
    ASSERT_EQ(none.code, 0) << none.err;
    EXPECT_NE(none.out.find("map 0.0000000000\n"), std::string::npos) << none.out;
    EXPECT_NE(none.out.find("fn 3"), std::string::npos) << none.out;

    write_text(dir / "one_gt.txt", "img head 10 10 4 4 fishA\n");
    write_text(dir / "hand.txt", "img head 10 10 4 4 0.4\nimg head 40 40 4 4 0.9\n");
    const auto hand = run_cli({"eval", "-d", (dir / "hand.txt").string(), "-g", (dir / "one_gt.txt").string()});
    EXPECT_NE(hand.out.find("map 0.5000000000\n"), std::string::npos) << hand.out;

    write_text(dir / "broken.txt", "img head 10 10 4\n");
    const auto broken = run_cli({"eval", "-d", (dir / "broken.txt").string(), "-g", (dir / "gt.txt").string()});
    EXPECT_NE(broken.code, 0);
    EXPECT_NE(broken.err.find("broken.txt:1"), std::string::npos) << broken.err;
}

TEST(Eval, KFoldReport) {
    support::TempDir dir("cli_kfold");
    std::ostringstream gt, det;
    for (int i = 0; i < 10; ++i) {
        gt << "img" << i << " head 10 10 4 4 fish" << i << "\n";
        det << "img" << i << " head 10 10 4 4 0.5\n";
    }
    write_text(dir / "gt.txt", gt.str());
    write_text(dir / "det.txt", det.str());
    const std::vector<std::string> args{"eval", "--kfold", "-k", "5", "--seed", "2", "-d", (dir / "det.txt").string(),
                                        "-g", (dir / "gt.txt").string()};
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t folds = 0;
    for (std::size_t pos = 0; (pos = r.out.find("fold ", pos)) != std::string::npos; ++pos) ++folds;
    EXPECT_EQ(folds, 5u);
    EXPECT_EQ(run_cli(args).out, r.out);
}

class HeatmapCli : public ::testing::Test {
protected:
    void SetUp() override {
        BinaryMask fish(100, 50);
        for (int y = 0; y < 50; ++y)
            for (int x = 0; x < 100; ++x) fish.set(x, y);
        write_mask(dir / "fishA_mask.png", fish);
    }
    support::TempDir dir{"cli_heatmap"};
};

TEST_F(HeatmapCli, SingleAnnotationPeaksAtOne) {
    write_text(dir / "gt.txt", "fishA head 20 20 10 10 fishA\n");
    const std::vector<std::string> args{"heatmap", "-g", (dir / "gt.txt").string(), "--aligned", dir.str(),
                                        "-o", (dir / "out").string(), "--width", "64", "--height", "32"};
    const auto r = run_cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto v = heatmap_values(dir / "out/heatmap_ocular.txt");
    ASSERT_EQ(v.size(), 64u * 32u);
    EXPECT_EQ(*std::max_element(v.begin(), v.end()), 1.0);
    EXPECT_EQ(*std::min_element(v.begin(), v.end()), 0.0);
    EXPECT_FALSE(fs::exists(dir / "out/heatmap_blind.txt"));
    const auto before = support::snapshot(dir / "out");
    ASSERT_EQ(run_cli(args).code, 0);
    EXPECT_EQ(before, support::snapshot(dir / "out"));
}

TEST_F(HeatmapCli, SidesProduceSeparateMaps) {
    write_text(dir / "gt.txt", "fishA head 20 20 10 10 fishA ocular\nfishA body 70 30 10 10 fishA blind\n");
    const auto r = run_cli({"heatmap", "-g", (dir / "gt.txt").string(), "--aligned", dir.str(), "-o", (dir / "out").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "out/heatmap_ocular.png"));
    EXPECT_TRUE(fs::exists(dir / "out/heatmap_blind.png"));
    EXPECT_NE(heatmap_values(dir / "out/heatmap_ocular.txt"), heatmap_values(dir / "out/heatmap_blind.txt"));
}

TEST_F(HeatmapCli, UnknownFishIsSkippedWithPartialExit) {
    write_text(dir / "gt.txt", "fishA head 20 20 10 10 fishA\nmissing head 20 20 10 10 nobody\n");
    const auto r = run_cli({"heatmap", "-g", (dir / "gt.txt").string(), "--aligned", dir.str(), "-o", (dir / "out").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("skip missing"), std::string::npos) << r.err;
    EXPECT_TRUE(fs::exists(dir / "out/heatmap_ocular.txt"));
}
