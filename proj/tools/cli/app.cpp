#include "app.hpp"

#include <CLI11.hpp>
#include <functional>
#include <ostream>

#include "commands.hpp"
#include "fishpart/error.hpp"

namespace fishpart::cli {
namespace {

// Flags that mirror config keys. Only flags actually given on the command
// line override the config file.
class KeyedFlags {
public:
    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        auto& slot = values_[key];
        options_.emplace_back(app->add_option(flag, slot, help + " [" + key + "]"), key);
    }
    void add_switch(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        switches_.emplace_back(app->add_flag(flag)->description(help + " [" + key + "]"), key);
    }
    PipelineConfig::Entries given() const {
        PipelineConfig::Entries out;
        for (const auto& [opt, key] : options_) {
            if (opt->count() > 0) out[key] = values_.at(key);
        }
        for (const auto& [opt, key] : switches_) {
            if (opt->count() > 0) out[key] = "true";
        }
        return out;
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::pair<CLI::Option*, std::string>> options_;
    std::vector<std::pair<CLI::Option*, std::string>> switches_;
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Geometric fish analysis: alignment, part segmentation, augmentation, evaluation, heatmaps"};
    app.require_subcommand(1);
    std::string config_file;
    bool print_config = false;
    app.add_option("--config", config_file, "key = value config file; flags override it")->check(CLI::ExistingFile);
    app.add_flag("--print-config", print_config, "print the effective config and exit");

    KeyedFlags flags;
    AugmentOptions augment_options;
    EvalOptions eval_options;
    SynthOptions synth_options;
    std::string from_manifest;

    auto* align = app.add_subcommand("align", "rotate fish horizontal and crop");
    flags.add(align, "--input,-i", "paths.input", "directory of images");
    flags.add(align, "--masks", "paths.masks", "directory of <id>_mask.png (default: input)");
    flags.add(align, "--output,-o", "paths.output", "output directory");
    flags.add(align, "--margin", "align.margin", "crop margin as a fraction of the longer side");
    flags.add(align, "--head", "align.head", "head side: auto, left or right");
    flags.add(align, "--canonical", "align.canonical", "output head side: keep, left or right");
    flags.add(align, "--jobs,-j", "jobs", "worker threads");

    auto* partseg = app.add_subcommand("partseg", "split aligned fish into head, fins and body");
    flags.add(partseg, "--input,-i", "paths.input", "directory of aligned fish");
    flags.add(partseg, "--output,-o", "paths.output", "output directory");
    flags.add(partseg, "--profile", "partseg.profile", "flatfish or fusiform");
    flags.add(partseg, "--head-offset", "partseg.head_offset", "snout to head center, in tail lengths");
    flags.add(partseg, "--tail-circle", "partseg.tail_circle", "tail circle radius, in tail thicknesses");
    flags.add(partseg, "--search-window", "partseg.search_window", "tail-side fraction searched for notches");
    flags.add(partseg, "--jobs,-j", "jobs", "worker threads");

    auto* augment = app.add_subcommand("augment", "composite disease patches onto fish");
    flags.add(augment, "--patches", "paths.patches", "directory of patches with <id>_mask.png");
    flags.add(augment, "--fish", "paths.fish", "directory of aligned fish with <id>_mask.png");
    flags.add(augment, "--parts", "paths.parts", "directory of <id>_parts.png label maps");
    flags.add(augment, "--output,-o", "paths.output", "output directory");
    flags.add(augment, "--count,-n", "augment.count", "samples to generate");
    flags.add(augment, "--seed", "seed", "random seed");
    flags.add(augment, "--scale-min", "augment.scale_min", "smallest patch scale");
    flags.add(augment, "--scale-max", "augment.scale_max", "largest patch scale");
    flags.add(augment, "--retries", "augment.retries", "placement attempts per plan");
    flags.add(augment, "--ring-width", "augment.ring_width", "harmonization ring width in px");
    flags.add(augment, "--jobs,-j", "jobs", "worker threads");
    augment->add_option("--from-manifest", from_manifest, "regenerate the samples listed in a manifest")
        ->check(CLI::ExistingFile);

    auto* eval = app.add_subcommand("eval", "score detections against ground truth");
    flags.add(eval, "--detections,-d", "paths.detections", "detection records");
    flags.add(eval, "--ground-truth,-g", "paths.ground_truth", "ground-truth records");
    flags.add(eval, "--report,-o", "paths.report", "also write the report here");
    flags.add(eval, "--iou", "eval.iou_threshold", "IoU a match must exceed");
    flags.add(eval, "--folds,-k", "eval.folds", "fold count for --kfold");
    flags.add(eval, "--seed", "seed", "fold assignment seed");
    eval->add_flag("--kfold", eval_options.kfold, "report per identity-disjoint fold");

    auto* heatmap = app.add_subcommand("heatmap", "accumulate occurrence heatmaps per side");
    flags.add(heatmap, "--ground-truth,-g", "paths.ground_truth", "ground-truth records");
    flags.add(heatmap, "--aligned", "paths.aligned", "directory of aligned fish masks");
    flags.add(heatmap, "--output,-o", "paths.output", "output directory");
    flags.add(heatmap, "--width", "heatmap.width", "canonical frame width");
    flags.add(heatmap, "--height", "heatmap.height", "canonical frame height");
    flags.add_switch(heatmap, "--smooth", "heatmap.smooth", "Gaussian smoothing before normalization");
    flags.add(heatmap, "--sigma", "heatmap.sigma", "smoothing sigma in px");

    auto* synth = app.add_subcommand("synth", "write procedurally generated fish and patches");
    flags.add(synth, "--output,-o", "paths.output", "output directory");
    flags.add(synth, "--seed", "seed", "random seed");
    flags.add(synth, "--profile", "partseg.profile", "flatfish or fusiform");
    flags.add(synth, "--jobs,-j", "jobs", "worker threads");
    synth->add_option("--count,-n", synth_options.count, "fish to generate");
    synth->add_option("--patches", synth_options.patches, "disease patches to generate");
    synth->add_option("--patch-size", synth_options.patch_size, "patch side in px")->check(CLI::Range(8, 512));
    synth->add_option("--max-rotation", synth_options.max_rotation_deg, "rotation drawn from [-r, r] degrees")
        ->check(CLI::Range(0.0, 180.0));
    synth->add_option("--head", synth_options.head, "head side: left, right or random");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    PipelineConfig config;
    try {
        if (!config_file.empty()) config.apply(PipelineConfig::read_file(config_file));
        config.apply(flags.given());
        config.validate();
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    }
    if (print_config) {
        out << config.to_text();
        return kSuccess;
    }
    if (!from_manifest.empty()) augment_options.from_manifest = from_manifest;

    const std::function<int()> command = [&]() -> std::function<int()> {
        const Streams io{out, err};
        if (*align) return [&, io] { return cmd_align(config, io); };
        if (*partseg) return [&, io] { return cmd_partseg(config, io); };
        if (*augment) return [&, io] { return cmd_augment(config, augment_options, io); };
        if (*eval) return [&, io] { return cmd_eval(config, eval_options, io); };
        if (*heatmap) return [&, io] { return cmd_heatmap(config, io); };
        return [&, io] { return cmd_synth(config, synth_options, io); };
    }();
    try {
        return command();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::InvalidArgument ? kUsageError : kPartialFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kPartialFailure;
    }
}

}  // namespace fishpart::cli
