#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fishpart/mask_ops.hpp"
#include "fishpart/raster.hpp"

namespace fishpart {

enum class PartLabel : std::uint8_t { Background = 0, Head = 1, Fins = 2, Body = 3 };
enum class BodyProfile { Flatfish, Fusiform };

std::string to_string(PartLabel label);
std::string to_string(BodyProfile profile);

/// Column-wise extent of a horizontally aligned fish. Raw extrema are kept
/// alongside their moving-average smoothing; notch search runs on the
/// smoothed copy, reported coordinates come from the raw one.
struct BoundaryProfile {
    int mask_width = 0;
    int mask_height = 0;
    int x_left = 0;
    int x_right = 0;
    std::vector<double> upper;  // min foreground y per column, gaps interpolated
    std::vector<double> lower;  // max foreground y per column
    std::vector<double> upper_smoothed;
    std::vector<double> lower_smoothed;

    std::size_t columns() const { return upper.size(); }
    std::vector<Point2> upper_points() const;
    std::vector<Point2> lower_points() const;
    /// Raw boundary linearly interpolated at a fractional column.
    double upper_at(double x) const;
    double lower_at(double x) const;
};

struct FeaturePointSet {
    Point2 tail_up;
    Point2 tail_low;
    Point2 tail_center;
    double tail_length = 0.0;
    double tail_thickness = 0.0;
    Point2 head_center;
    Point2 head_up;
    Point2 head_low;
    Point2 snout;
    HeadSide head_side = HeadSide::Left;
};

struct EllipseParams {
    Point2 center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double axis_angle_deg = 0.0;  // direction of the major axis from +x

    bool contains(Point2 p) const;
    /// Builds a valid ellipse from two perpendicular full axis lengths; the
    /// first axis points along `first_axis_deg`.
    static EllipseParams from_axes(Point2 center, double first_axis_length, double second_axis_length,
                                   double first_axis_deg);
};

struct Circle {
    Point2 center;
    double radius = 0.0;
    bool contains(Point2 p) const { return distance(p, center) <= radius; }
};

struct PartRegions {
    BodyProfile profile = BodyProfile::Flatfish;
    FeaturePointSet points;  // tail fields as given, head fields completed
    EllipseParams head;
    EllipseParams body;
    EllipseParams fin_envelope;
    Circle tail_circle;
};

class PartLabelMap {
public:
    PartLabelMap() = default;
    PartLabelMap(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    PartLabel at(int x, int y) const { return static_cast<PartLabel>(labels_[index(x, y)]); }
    void set(int x, int y, PartLabel label) { labels_[index(x, y)] = static_cast<std::uint8_t>(label); }
    std::span<const std::uint8_t> data() const noexcept { return labels_; }

    /// Pixel count per label, indexed by the label's numeric value.
    std::array<std::size_t, 4> counts() const;

    static PartLabelMap from_indexed(int width, int height, std::vector<std::uint8_t> values);

    friend bool operator==(const PartLabelMap&, const PartLabelMap&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

struct PartSegConfig {
    double search_window = 0.4;     // tail-side fraction of the horizontal extent
    int smoothing_window = 9;       // moving-average length, odd
    int extremum_radius = 5;        // half-width of the local-extremum neighbourhood
    double min_notch_depth = 1.0;   // px below the enclosing envelope
    int max_column_gap = 2;         // empty columns tolerated inside the extent
    double head_offset = 0.5;       // snout-to-head-center distance in tail lengths
    double tail_circle = 0.75;      // tail circle radius in tail thicknesses
    double peduncle_ratio = 2.0;    // body fit stops where the chord drops to this many tail thicknesses
};

BoundaryProfile extract_boundary(const BinaryMask& mask, const PartSegConfig& config = {});

/// Tail notches on the tail side of the fish. Only the tail fields and
/// `head_side` of the result are populated.
FeaturePointSet find_tail_points(const BoundaryProfile& profile, HeadSide head_side, const PartSegConfig& config = {});

/// Fills the snout and head chord fields from the tail length.
void find_head_points(const BoundaryProfile& profile, FeaturePointSet& points, const PartSegConfig& config = {});

PartRegions fit_part_regions(const BinaryMask& mask, const FeaturePointSet& points, BodyProfile profile_kind,
                             const PartSegConfig& config = {});

/// Head, then body, then fins; every foreground pixel gets exactly one part.
PartLabelMap rasterize_part_labels(const BinaryMask& mask, const PartRegions& regions);

/// Majority part among foreground pixels whose centers fall in the box;
/// ties resolve head, then fins, then body.
PartLabel assign_box_to_part(const BoundingBox& box, const PartLabelMap& labels);

struct PartSegmentation {
    BoundaryProfile boundary;
    PartRegions regions;
    PartLabelMap labels;
};

PartSegmentation segment_parts(const BinaryMask& mask, HeadSide head_side, BodyProfile profile_kind,
                               const PartSegConfig& config = {});

/// Sidecar text: one `key value...` line per feature point and region.
void write_part_record(std::ostream& out, const PartRegions& regions);
PartRegions parse_part_record(std::istream& in, const std::string& source);

}  // namespace fishpart
