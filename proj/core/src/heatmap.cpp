#include "fishpart/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "fishpart/error.hpp"
#include "fishpart/filters.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart {

std::string to_string(Side side) { return side == Side::Ocular ? "ocular" : "blind"; }

Side parse_side(const std::string& text) {
    if (text == "ocular") return Side::Ocular;
    if (text == "blind") return Side::Blind;
    throw Error(ErrorCode::Parse, "unknown side '" + text + "'");
}

Affine2 box_to_canonical(const BoundingBox& fish_box, CanonicalSize size) {
    const double sx = size.width / fish_box.w, sy = size.height / fish_box.h;
    return {sx, 0.0, -fish_box.x0() * sx, 0.0, sy, -fish_box.y0() * sy};
}

Footprint warp_box_to_canonical(const BoundingBox& box, const BoundingBox& fish_box, CanonicalSize size) {
    if (size.width <= 0 || size.height <= 0) throw Error(ErrorCode::InvalidArgument, "canonical frame must be non-empty");
    if (!(fish_box.w > 0.0) || !(fish_box.h > 0.0)) throw Error(ErrorCode::InvalidArgument, "fish box must be non-empty");
    if (box.x1() <= fish_box.x0() || box.x0() >= fish_box.x1() || box.y1() <= fish_box.y0() ||
        box.y0() >= fish_box.y1()) {
        throw Error(ErrorCode::OutOfFrame, "box does not intersect the fish");
    }
    // Offset first, then scale and divide once, so half-pixel inputs map to
    // mirror-symmetric positions.
    const auto map_x = [&](double x) { return std::clamp((x - fish_box.x0()) * size.width / fish_box.w, 0.0, double(size.width)); };
    const auto map_y = [&](double y) { return std::clamp((y - fish_box.y0()) * size.height / fish_box.h, 0.0, double(size.height)); };
    return {map_x(box.x0()), map_y(box.y0()), map_x(box.x1()), map_y(box.y1())};
}

Footprint warp_box_to_canonical(const BoundingBox& box, const AlignedFish& fish, CanonicalSize size) {
    return warp_box_to_canonical(box, bbox_from_mask(fish.mask), size);
}

OccurrenceGrid::OccurrenceGrid(CanonicalSize size, Side s)
    : width(size.width),
      height(size.height),
      side(s),
      counts(static_cast<std::size_t>(size.width) * static_cast<std::size_t>(size.height), 0.0) {}

void OccurrenceGrid::add(const Footprint& f) {
    for (int y = 0; y < height; ++y) {
        if (!(y + 0.5 > f.y0 && y + 0.5 < f.y1)) continue;
        for (int x = 0; x < width; ++x) {
            if (x + 0.5 > f.x0 && x + 0.5 < f.x1) counts[static_cast<std::size_t>(y) * width + x] += 1.0;
        }
    }
}

void OccurrenceGrid::merge(const OccurrenceGrid& other) {
    if (other.width != width || other.height != height) throw Error(ErrorCode::InvalidArgument, "grid sizes differ");
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
}

Heatmap normalize(const OccurrenceGrid& grid, const HeatmapConfig& config) {
    Heatmap map{grid.width, grid.height, grid.side, grid.counts};
    if (config.smooth) {
        if (!(config.sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing sigma must be positive");
        const int radius = static_cast<int>(std::ceil(3.0 * config.sigma));
        map.values = convolve_separable(map.values, map.width, map.height, gaussian_kernel_1d(config.sigma, radius));
    }
    const double peak = map.values.empty() ? 0.0 : *std::max_element(map.values.begin(), map.values.end());
    if (!(peak > 0.0)) throw Error(ErrorCode::EmptyInput, "no occurrences on the " + to_string(grid.side) + " side");
    for (double& v : map.values) v = std::max(0.0, v) / peak;
    return map;
}

std::vector<Heatmap> accumulate_and_normalize(std::span<const SidedFootprint> footprints, CanonicalSize size,
                                              const HeatmapConfig& config) {
    if (footprints.empty()) throw Error(ErrorCode::EmptyInput, "no footprints to accumulate");
    std::vector<Heatmap> out;
    for (Side side : {Side::Ocular, Side::Blind}) {
        OccurrenceGrid grid(size, side);
        bool any = false;
        for (const auto& f : footprints) {
            if (f.side != side) continue;
            grid.add(f.footprint);
            any = true;
        }
        if (any) out.push_back(normalize(grid, config));
    }
    return out;
}

void write_heatmap_text(std::ostream& out, const Heatmap& map) {
    out << "heatmap " << to_string(map.side) << ' ' << map.width << ' ' << map.height << '\n';
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            if (x > 0) out << ' ';
            out << format_number(map.at(x, y));
        }
        out << '\n';
    }
}

void write_heatmap_text(const std::filesystem::path& path, const Heatmap& map) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_heatmap_text(out, map);
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

void write_heatmap_png(const std::filesystem::path& path, const Heatmap& map) {
    cv::Mat gray(map.height, map.width, CV_8UC1);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            gray.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(std::lround(map.at(x, y) * 255.0));
        }
    }
    cv::Mat colored;
    cv::applyColorMap(gray, colored, cv::COLORMAP_JET);
    if (!cv::imwrite(path.string(), colored, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

}  // namespace fishpart
