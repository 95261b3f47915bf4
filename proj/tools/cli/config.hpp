#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "fishpart/augmentation.hpp"
#include "fishpart/heatmap.hpp"
#include "fishpart/mask_ops.hpp"
#include "fishpart/part_segmentation.hpp"

namespace fishpart::cli {

/// Everything a batch run depends on besides its input files. Text form is
/// one `key = value` per line; `#` starts a comment line.
struct PipelineConfig {
    std::map<std::string, std::filesystem::path> paths;  // `paths.<name>`

    AlignConfig align;
    BodyProfile profile = BodyProfile::Flatfish;
    PartSegConfig partseg;
    AugmentConfig augment;
    std::size_t augment_count = 100;
    double iou_threshold = 0.5;
    int folds = 5;
    CanonicalSize canonical;
    HeatmapConfig heatmap;
    std::optional<std::uint64_t> seed;
    int jobs = 1;

    using Entries = std::map<std::string, std::string>;

    /// Overwrites the fields named in `entries`; unknown keys and bad values
    /// throw Error(InvalidArgument).
    void apply(const Entries& entries);
    void validate() const;
    std::string to_text() const;
    static Entries parse_text(const std::string& text, const std::string& source);
    static Entries read_file(const std::filesystem::path& path);

    std::filesystem::path path(const std::string& name) const;
    std::uint64_t require_seed(const std::string& command) const;
};

bool operator==(const PipelineConfig& a, const PipelineConfig& b);

}  // namespace fishpart::cli
