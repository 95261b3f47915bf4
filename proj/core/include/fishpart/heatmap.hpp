#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fishpart/mask_ops.hpp"

namespace fishpart {

enum class Side { Ocular, Blind };

std::string to_string(Side side);
Side parse_side(const std::string& text);

struct CanonicalSize {
    int width = 512;
    int height = 256;
};

/// Axis-aligned region in continuous canonical-frame coordinates, where the
/// frame spans [0, width] x [0, height] and pixel (i, j) covers
/// [i, i+1] x [j, j+1].
struct Footprint {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;
    friend bool operator==(const Footprint&, const Footprint&) = default;
};

/// Affine scaling that sends the fish box onto the whole canonical frame.
Affine2 box_to_canonical(const BoundingBox& fish_box, CanonicalSize size);

/// Map a box given in aligned-image coordinates into the frame and clip it.
Footprint warp_box_to_canonical(const BoundingBox& box, const BoundingBox& fish_box, CanonicalSize size = {});
Footprint warp_box_to_canonical(const BoundingBox& box, const AlignedFish& fish, CanonicalSize size = {});

struct OccurrenceGrid {
    OccurrenceGrid() = default;
    OccurrenceGrid(CanonicalSize size, Side side);

    int width = 0;
    int height = 0;
    Side side = Side::Ocular;
    std::vector<double> counts;

    /// +1 on every pixel whose center lies strictly inside the footprint.
    void add(const Footprint& footprint);
    void merge(const OccurrenceGrid& other);
    double at(int x, int y) const { return counts[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

struct HeatmapConfig {
    bool smooth = false;
    double sigma = 3.0;
};

struct Heatmap {
    int width = 0;
    int height = 0;
    Side side = Side::Ocular;
    std::vector<double> values;  // in [0, 1], maximum exactly 1
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

Heatmap normalize(const OccurrenceGrid& grid, const HeatmapConfig& config = {});

struct SidedFootprint {
    Side side = Side::Ocular;
    Footprint footprint;
};

/// One heatmap per side present in the input, ocular first.
std::vector<Heatmap> accumulate_and_normalize(std::span<const SidedFootprint> footprints, CanonicalSize size = {},
                                              const HeatmapConfig& config = {});

void write_heatmap_text(std::ostream& out, const Heatmap& map);
void write_heatmap_text(const std::filesystem::path& path, const Heatmap& map);
/// Color-mapped rendering (jet), value 1 at the hot end.
void write_heatmap_png(const std::filesystem::path& path, const Heatmap& map);

}  // namespace fishpart
