#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace fishpart::cli {

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kUsageError = 2 };

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

struct AugmentOptions {
    std::optional<std::filesystem::path> from_manifest;
};

struct EvalOptions {
    bool kfold = false;
};

struct SynthOptions {
    std::size_t count = 10;
    std::size_t patches = 0;
    int patch_size = 24;
    double max_rotation_deg = 0.0;
    std::string head = "left";  // left, right or random
};

int cmd_align(const PipelineConfig& config, Streams io);
int cmd_partseg(const PipelineConfig& config, Streams io);
int cmd_augment(const PipelineConfig& config, const AugmentOptions& options, Streams io);
int cmd_eval(const PipelineConfig& config, const EvalOptions& options, Streams io);
int cmd_heatmap(const PipelineConfig& config, Streams io);
int cmd_synth(const PipelineConfig& config, const SynthOptions& options, Streams io);

/// Draws part labels, fitted ellipses, the tail circle and feature points.
void write_part_overlay(const std::filesystem::path& path, const Image& image, const PartSegmentation& seg);

}  // namespace fishpart::cli
