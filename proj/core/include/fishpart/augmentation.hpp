#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fishpart/mask_ops.hpp"
#include "fishpart/part_segmentation.hpp"
#include "fishpart/raster.hpp"

namespace fishpart {

/// Pre-generated disease patch: lesion foreground plus its healthy margin
/// (the complement of `fg_mask`).
struct PatchRecord {
    std::string patch_id;
    Image image;
    BinaryMask fg_mask;
};

/// Disease-free fish used as a compositing target.
struct TargetFish {
    std::string fish_id;
    Image image;
    BinaryMask mask;
    std::optional<PartLabelMap> parts;
};

/// One placement; `anchor` is where the center of the scaled patch lands.
struct AugmentationPlan {
    std::string patch_id;
    std::string fish_id;
    int anchor_x = 0;
    int anchor_y = 0;
    double scale = 1.0;
    std::uint64_t seed = 0;

    friend bool operator==(const AugmentationPlan&, const AugmentationPlan&) = default;
};

struct AugmentedSample {
    Image image;
    BoundingBox gt_box;
    std::string part_class;  // head, fins, body, or "disease" without a label map
    AugmentationPlan provenance;
};

struct AugmentConfig {
    double scale_min = 0.8;
    double scale_max = 1.2;
    int max_retries = 1000;
    int ring_width = 8;
    double matte_sigma = 0.5;
};

struct ScaledPatch {
    Image image;
    BinaryMask fg;
};

/// Bilinear resize of the patch; the foreground is the bilinear mask
/// coverage thresholded at one half.
ScaledPatch scale_patch(const PatchRecord& patch, double scale);

/// Top-left corner of the scaled patch in fish coordinates.
struct PatchOrigin {
    int x = 0;
    int y = 0;
};
PatchOrigin patch_origin(const AugmentationPlan& plan, int scaled_width, int scaled_height);

AugmentationPlan sample_placement(const PatchRecord& patch, const TargetFish& fish, std::uint64_t seed,
                                  const AugmentConfig& config = {});

/// Fish pixels within `ring_width` of the placed lesion foreground, the
/// foreground itself excluded; row-major in fish coordinates.
BinaryMask harmonization_ring(const TargetFish& fish, const ScaledPatch& scaled, PatchOrigin origin, int ring_width);

/// Color-statistics transfer of the scaled patch toward the ring around its
/// placement; returns the adjusted scaled patch.
Image harmonize_colors(const PatchRecord& patch, const TargetFish& fish, const AugmentationPlan& plan,
                       const AugmentConfig& config = {});

struct Matte {
    int width = 0;
    int height = 0;
    std::vector<double> alpha;  // row-major, in [0, 1]

    double at(int x, int y) const { return alpha[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

Matte blur_boundary(const BinaryMask& fg_mask, double sigma = 0.5);

AugmentedSample composite(const TargetFish& fish, const Image& adjusted_patch, const Matte& matte,
                          const AugmentationPlan& plan);

/// Full pipeline for one plan: scale, harmonize, soften, blend.
AugmentedSample apply_plan(const PatchRecord& patch, const TargetFish& fish, const AugmentationPlan& plan,
                           const AugmentConfig& config = {});

/// |P| x |H| x N_s, with overflow reported.
std::uint64_t combination_count(std::uint64_t n_patches, std::uint64_t n_fish, std::uint64_t n_size_variants);

/// One line of the augmentation manifest (JSON Lines). Fields:
/// sample_id, image, patch_id, fish_id, anchor [x, y], scale, seed,
/// gt_box [cx, cy, w, h], part_class.
struct ManifestRecord {
    std::string sample_id;
    std::string image_path;
    AugmentationPlan plan;
    BoundingBox gt_box;
    std::string part_class;

    friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

std::string to_manifest_line(const ManifestRecord& record);
ManifestRecord parse_manifest_line(const std::string& line, const std::string& context);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path);

}  // namespace fishpart
