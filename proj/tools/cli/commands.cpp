#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "fishpart/error.hpp"
#include "fishpart/evaluation.hpp"
#include "fishpart/image_io.hpp"
#include "fishpart/random.hpp"
#include "fishpart/synthetic.hpp"
#include "fishpart/text_format.hpp"
#include "pool.hpp"

namespace fishpart::cli {
namespace fs = std::filesystem;
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Primary images of a directory, skipping the companion rasters written
// next to them.
std::vector<fs::path> list_images(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::InvalidArgument, "not a directory: " + dir.string());
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || !is_image_file(entry.path())) continue;
        const std::string stem = entry.path().stem().string();
        if (ends_with(stem, "_mask") || ends_with(stem, "_parts") || ends_with(stem, "_overlay")) continue;
        out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

fs::path companion(const fs::path& dir, const std::string& id, const std::string& suffix) {
    return dir / (id + suffix);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string numbered(const char* prefix, std::size_t i, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, digits, i);
    return buf;
}

struct ItemResult {
    bool ok = false;
    std::string line;
};

int report_items(const std::vector<ItemResult>& results, const std::string& what, Streams io) {
    std::size_t failed = 0;
    for (const auto& r : results) {
        (r.ok ? io.out : io.err) << r.line << '\n';
        if (!r.ok) ++failed;
    }
    io.out << what << ": " << results.size() - failed << " ok, " << failed << " failed\n";
    return failed == 0 && !results.empty() ? kSuccess : kPartialFailure;
}

void write_align_sidecar(const fs::path& path, const AlignedFish& fish) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const Affine2& m = fish.source_to_aligned;
    out << "rotation_deg " << format_number(fish.rotation_deg) << '\n'
        << "head_side " << to_string(fish.head_side) << '\n'
        << "flipped " << (fish.flipped ? 1 : 0) << '\n'
        << "source_to_aligned " << format_number(m.a) << ' ' << format_number(m.b) << ' ' << format_number(m.tx) << ' '
        << format_number(m.c) << ' ' << format_number(m.d) << ' ' << format_number(m.ty) << '\n';
}

std::optional<HeadSide> read_head_side(const fs::path& sidecar) {
    std::ifstream in(sidecar);
    if (!in) return std::nullopt;
    std::string line;
    while (std::getline(in, line)) {
        const auto f = split_fields(line);
        if (f.size() == 2 && f[0] == "head_side") {
            if (f[1] == "left") return HeadSide::Left;
            if (f[1] == "right") return HeadSide::Right;
            throw Error(ErrorCode::Parse, sidecar.string() + ": bad head_side");
        }
    }
    return std::nullopt;
}

void write_truth(const fs::path& path, const SyntheticFish& fish) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const FeaturePointSet& t = fish.truth;
    const auto point = [&](const char* key, Point2 p) {
        out << key << ' ' << format_number(p.x) << ' ' << format_number(p.y) << '\n';
    };
    out << "profile " << to_string(fish.profile) << '\n'
        << "head_side " << to_string(fish.head_side) << '\n'
        << "rotation_deg " << format_number(fish.rotation_deg) << '\n';
    point("snout", t.snout);
    point("tail_up", t.tail_up);
    point("tail_low", t.tail_low);
    point("tail_center", t.tail_center);
    point("head_up", t.head_up);
    point("head_low", t.head_low);
    point("head_center", t.head_center);
    out << "tail_length " << format_number(t.tail_length) << '\n'
        << "tail_thickness " << format_number(t.tail_thickness) << '\n';
}

struct Inputs {
    std::vector<PatchRecord> patches;
    std::vector<TargetFish> fish;
    std::map<std::string, std::size_t> patch_index;
    std::map<std::string, std::size_t> fish_index;
};

Inputs load_augment_inputs(const PipelineConfig& config) {
    Inputs in;
    const fs::path patch_dir = config.path("patches"), fish_dir = config.path("fish");
    const auto parts_it = config.paths.find("parts");
    const std::optional<fs::path> parts_dir =
        parts_it != config.paths.end() && !parts_it->second.empty() ? std::optional(parts_it->second) : std::nullopt;
    for (const fs::path& p : list_images(patch_dir)) {
        const std::string id = p.stem().string();
        in.patch_index[id] = in.patches.size();
        in.patches.push_back({id, read_image(p), read_mask(companion(patch_dir, id, "_mask.png"))});
    }
    for (const fs::path& p : list_images(fish_dir)) {
        const std::string id = p.stem().string();
        TargetFish fish{id, read_image(p), read_mask(companion(fish_dir, id, "_mask.png")), std::nullopt};
        if (parts_dir) {
            const fs::path labels = companion(*parts_dir, id, "_parts.png");
            if (fs::exists(labels)) {
                int w = 0, h = 0;
                auto values = read_gray(labels, w, h);
                fish.parts = PartLabelMap::from_indexed(w, h, std::move(values));
            }
        }
        in.fish_index[id] = in.fish.size();
        in.fish.push_back(std::move(fish));
    }
    if (in.patches.empty()) throw Error(ErrorCode::InvalidArgument, "no patches in " + patch_dir.string());
    if (in.fish.empty()) throw Error(ErrorCode::InvalidArgument, "no fish in " + fish_dir.string());
    return in;
}

struct Produced {
    std::optional<AugmentedSample> sample;
    std::string error;
};

std::vector<Produced> apply_plans(const Inputs& in, const std::vector<AugmentationPlan>& plans,
                                  const PipelineConfig& config) {
    std::vector<Produced> out(plans.size());
    parallel_for(plans.size(), config.jobs, [&](std::size_t i) {
        try {
            const auto& plan = plans[i];
            out[i].sample = apply_plan(in.patches.at(in.patch_index.at(plan.patch_id)),
                                       in.fish.at(in.fish_index.at(plan.fish_id)), plan, config.augment);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    });
    return out;
}

void write_augment_outputs(const fs::path& out_dir, const std::vector<ManifestRecord>& records,
                           const std::vector<AugmentedSample>& samples, int jobs) {
    ensure_dir(out_dir / "images");
    std::vector<std::string> errors(records.size());
    parallel_for(records.size(), jobs, [&](std::size_t i) {
        try {
            write_image(out_dir / records[i].image_path, samples[i].image);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(ErrorCode::Io, e);
    }
    write_manifest(out_dir / "manifest.jsonl", records);
    std::ofstream gt(out_dir / "ground_truth.txt");
    if (!gt) throw Error(ErrorCode::Io, "cannot write " + (out_dir / "ground_truth.txt").string());
    for (const auto& r : records) write_ground_truth(gt, {r.sample_id, r.part_class, r.gt_box, r.plan.fish_id, "ocular"});
}

int augment_from_manifest(const PipelineConfig& config, const fs::path& manifest, Streams io) {
    const Inputs in = load_augment_inputs(config);
    const fs::path out_dir = config.path("output");
    const std::vector<ManifestRecord> records = read_manifest(manifest);
    std::vector<AugmentationPlan> plans;
    for (const auto& r : records) plans.push_back(r.plan);
    const std::vector<Produced> produced = apply_plans(in, plans, config);

    std::vector<AugmentedSample> samples;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!produced[i].sample) {
            io.err << "fail " << records[i].sample_id << ": " << produced[i].error << '\n';
            ++failed;
            continue;
        }
        if (produced[i].sample->gt_box != records[i].gt_box || produced[i].sample->part_class != records[i].part_class) {
            io.err << "fail " << records[i].sample_id << ": regenerated box or class differs from the manifest\n";
            ++failed;
        }
        samples.push_back(*produced[i].sample);
    }
    if (failed > 0) return kPartialFailure;
    write_augment_outputs(out_dir, records, samples, config.jobs);
    io.out << "regenerated " << records.size() << " samples\n";
    return kSuccess;
}

}  // namespace

int cmd_align(const PipelineConfig& config, Streams io) {
    const fs::path in_dir = config.path("input"), out_dir = config.path("output");
    const auto masks_it = config.paths.find("masks");
    const fs::path mask_dir = masks_it != config.paths.end() && !masks_it->second.empty() ? masks_it->second : in_dir;
    const std::vector<fs::path> images = list_images(in_dir);
    ensure_dir(out_dir);

    std::vector<ItemResult> results(images.size());
    parallel_for(images.size(), config.jobs, [&](std::size_t i) {
        const std::string id = images[i].stem().string();
        try {
            const Image image = read_image(images[i]);
            const fs::path mask_path = companion(mask_dir, id, "_mask.png");
            const bool has_mask = fs::exists(mask_path);
            const BinaryMask mask = has_mask ? read_mask(mask_path) : mask_from_color_fallback(image);
            const AlignedFish aligned = align_horizontal(image, mask, config.align);
            write_image(companion(out_dir, id, ".png"), aligned.image);
            write_mask(companion(out_dir, id, "_mask.png"), aligned.mask);
            write_align_sidecar(companion(out_dir, id, ".align.txt"), aligned);
            results[i] = {true, "ok " + id + " rotation=" + format_fixed(aligned.rotation_deg, 2) +
                                    " head=" + to_string(aligned.head_side) + (has_mask ? "" : " mask=fallback")};
        } catch (const std::exception& e) {
            results[i] = {false, "fail " + id + ": " + e.what()};
        }
    });
    return report_items(results, "align", io);
}

int cmd_partseg(const PipelineConfig& config, Streams io) {
    const fs::path in_dir = config.path("input"), out_dir = config.path("output");
    const std::vector<fs::path> images = list_images(in_dir);
    ensure_dir(out_dir);

    std::vector<ItemResult> results(images.size());
    parallel_for(images.size(), config.jobs, [&](std::size_t i) {
        const std::string id = images[i].stem().string();
        try {
            const Image image = read_image(images[i]);
            const BinaryMask mask = read_mask(companion(in_dir, id, "_mask.png"));
            const HeadSide side = read_head_side(companion(in_dir, id, ".align.txt")).value_or(estimate_head_side(mask));
            const PartSegmentation seg = segment_parts(mask, side, config.profile, config.partseg);
            write_gray(companion(out_dir, id, "_parts.png"), seg.labels.width(), seg.labels.height(),
                       {seg.labels.data().begin(), seg.labels.data().end()});
            std::ofstream record(companion(out_dir, id, ".parts.txt"));
            write_part_record(record, seg.regions);
            if (!record) throw Error(ErrorCode::Io, "cannot write part record for " + id);
            write_part_overlay(companion(out_dir, id, "_overlay.png"), image, seg);
            const auto counts = seg.labels.counts();
            results[i] = {true, "ok " + id + " head=" + std::to_string(counts[1]) + " fins=" + std::to_string(counts[2]) +
                                    " body=" + std::to_string(counts[3])};
        } catch (const std::exception& e) {
            results[i] = {false, "fail " + id + ": " + e.what()};
        }
    });
    return report_items(results, "partseg", io);
}

int cmd_augment(const PipelineConfig& config, const AugmentOptions& options, Streams io) {
    if (options.from_manifest) return augment_from_manifest(config, *options.from_manifest, io);
    const std::uint64_t seed = config.require_seed("augment");
    const Inputs in = load_augment_inputs(config);
    const fs::path out_dir = config.path("output");
    const std::size_t target = config.augment_count;
    const std::size_t max_attempts = std::max<std::size_t>(4 * target, 16);

    // Plans are drawn sequentially from one stream; rendering runs in
    // parallel in rounds until the target is met or attempts run out.
    Rng master(seed);
    std::vector<AugmentedSample> samples;
    std::size_t attempt = 0;
    while (samples.size() < target && attempt < max_attempts) {
        std::vector<AugmentationPlan> plans;
        while (plans.size() < target - samples.size() && attempt < max_attempts) {
            const auto& patch = in.patches[master.below(in.patches.size())];
            const auto& fish = in.fish[master.below(in.fish.size())];
            const std::uint64_t plan_seed = mix_seed(seed, attempt);
            ++attempt;
            try {
                plans.push_back(sample_placement(patch, fish, plan_seed, config.augment));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::PlacementInfeasible) throw;
                io.err << "skip " << patch.patch_id << " on " << fish.fish_id << ": " << e.what() << '\n';
            }
        }
        for (auto& p : apply_plans(in, plans, config)) {
            if (p.sample) samples.push_back(std::move(*p.sample));
            else io.err << "skip: " << p.error << '\n';
        }
    }

    std::vector<ManifestRecord> records;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string id = numbered("sample_", i, 6);
        records.push_back({id, "images/" + id + ".png", samples[i].provenance, samples[i].gt_box, samples[i].part_class});
    }
    write_augment_outputs(out_dir, records, samples, config.jobs);
    io.out << "augment: " << samples.size() << " of " << target << " samples after " << attempt << " attempts\n";
    if (samples.size() < target) {
        io.err << "shortfall: " << target - samples.size() << " samples could not be placed\n";
        return kPartialFailure;
    }
    return kSuccess;
}

int cmd_eval(const PipelineConfig& config, const EvalOptions& options, Streams io) {
    const auto detections = read_detections(config.path("detections"));
    const auto truths = read_ground_truth(config.path("ground_truth"));
    std::ostringstream text;
    if (!options.kfold) {
        text << format_report(evaluate(detections, truths, config.iou_threshold));
    } else {
        const auto folds = kfold_split(truths, config.folds, config.require_seed("eval --kfold"));
        double sum = 0.0;
        for (std::size_t f = 0; f < folds.size(); ++f) {
            std::vector<GroundTruthRecord> fold_truths;
            std::set<std::string> images;
            for (std::size_t r : folds[f].records) {
                fold_truths.push_back(truths[r]);
                images.insert(truths[r].image_id);
            }
            std::vector<DetectionRecord> fold_detections;
            for (const auto& d : detections) {
                if (images.count(d.image_id)) fold_detections.push_back(d);
            }
            const EvalReport report = evaluate(fold_detections, fold_truths, config.iou_threshold);
            text << "fold " << f << " identities " << folds[f].identities.size() << " records "
                 << folds[f].records.size() << '\n'
                 << format_report(report);
            sum += report.map;
        }
        text << "mean_fold_map " << format_fixed(sum / static_cast<double>(folds.size()), 10) << '\n';
    }
    io.out << text.str();
    const auto it = config.paths.find("report");
    if (it != config.paths.end() && !it->second.empty()) {
        std::ofstream out(it->second);
        out << text.str();
        if (!out) throw Error(ErrorCode::Io, "cannot write " + it->second.string());
    }
    return kSuccess;
}

int cmd_heatmap(const PipelineConfig& config, Streams io) {
    const auto truths = read_ground_truth(config.path("ground_truth"));
    const fs::path aligned = config.path("aligned"), out_dir = config.path("output");
    std::map<fs::path, BoundingBox> fish_boxes;
    std::vector<SidedFootprint> footprints;
    std::size_t skipped = 0;
    for (const auto& g : truths) {
        try {
            fs::path mask = companion(aligned, g.image_id, "_mask.png");
            if (!fs::exists(mask)) mask = companion(aligned, g.identity_id, "_mask.png");
            auto it = fish_boxes.find(mask);
            if (it == fish_boxes.end()) it = fish_boxes.emplace(mask, bbox_from_mask(read_mask(mask))).first;
            footprints.push_back({parse_side(g.side), warp_box_to_canonical(g.box, it->second, config.canonical)});
        } catch (const Error& e) {
            io.err << "skip " << g.image_id << ": " << e.what() << '\n';
            ++skipped;
        }
    }
    const auto maps = accumulate_and_normalize(footprints, config.canonical, config.heatmap);
    ensure_dir(out_dir);
    for (const Heatmap& m : maps) {
        write_heatmap_text(out_dir / ("heatmap_" + to_string(m.side) + ".txt"), m);
        write_heatmap_png(out_dir / ("heatmap_" + to_string(m.side) + ".png"), m);
        io.out << "heatmap " << to_string(m.side) << " written\n";
    }
    io.out << "heatmap: " << footprints.size() << " footprints, " << skipped << " skipped\n";
    return skipped == 0 ? kSuccess : kPartialFailure;
}

int cmd_synth(const PipelineConfig& config, const SynthOptions& options, Streams io) {
    const std::uint64_t seed = config.require_seed("synth");
    const fs::path out_dir = config.path("output");
    if (options.head != "left" && options.head != "right" && options.head != "random") {
        throw Error(ErrorCode::InvalidArgument, "--head must be left, right or random");
    }
    ensure_dir(out_dir);
    std::vector<ItemResult> results(options.count);
    parallel_for(options.count, config.jobs, [&](std::size_t i) {
        const std::string id = numbered("fish_", i, 4);
        try {
            Rng pose(mix_seed(seed, 1'000'000 + i));
            SyntheticConfig sc;
            sc.profile = config.profile;
            sc.rotation_deg = pose.uniform(-options.max_rotation_deg, options.max_rotation_deg);
            const bool right = options.head == "right" || (options.head == "random" && pose.below(2) == 1);
            sc.head_side = right ? HeadSide::Right : HeadSide::Left;
            const SyntheticFish fish = make_synthetic_fish(mix_seed(seed, i), sc);
            write_image(companion(out_dir, id, ".png"), fish.image);
            write_mask(companion(out_dir, id, "_mask.png"), fish.mask);
            write_truth(companion(out_dir, id, ".truth.txt"), fish);
            results[i] = {true, "ok " + id};
        } catch (const std::exception& e) {
            results[i] = {false, "fail " + id + ": " + e.what()};
        }
    });
    if (options.patches > 0) {
        const fs::path patch_dir = out_dir / "patches";
        ensure_dir(patch_dir);
        for (std::size_t i = 0; i < options.patches; ++i) {
            const std::string id = numbered("patch_", i, 4);
            const PatchRecord patch = make_disease_patch(mix_seed(seed, 2'000'000 + i), options.patch_size, id);
            write_image(companion(patch_dir, id, ".png"), patch.image);
            write_mask(companion(patch_dir, id, "_mask.png"), patch.fg_mask);
        }
        io.out << "wrote " << options.patches << " patches\n";
    }
    return report_items(results, "synth", io);
}

}  // namespace fishpart::cli
