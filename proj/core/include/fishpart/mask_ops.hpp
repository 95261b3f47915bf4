#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fishpart/raster.hpp"

namespace fishpart {

/// Axis-aligned box in center/size form. Edges are continuous coordinates,
/// so a box produced from pixels (2..5) has left edge 1.5 and width 4.
struct BoundingBox {
    double cx = 0.0;
    double cy = 0.0;
    double w = 0.0;
    double h = 0.0;

    double x0() const { return cx - w / 2.0; }
    double x1() const { return cx + w / 2.0; }
    double y0() const { return cy - h / 2.0; }
    double y1() const { return cy + h / 2.0; }
    double area() const { return w * h; }

    static BoundingBox from_edges(double x0, double y0, double x1, double y1) {
        return {(x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0};
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ShapeStats {
    Point2 mean;
    double cov_xx = 0.0;
    double cov_xy = 0.0;
    double cov_yy = 0.0;
    double lambda_major = 0.0;
    double lambda_minor = 0.0;
    Point2 principal_axis;  // unit length, angle in (-90, 90]

    /// Angle of the principal axis from +x in degrees; y grows downward.
    double axis_angle_deg() const;
    std::size_t pixel_count = 0;
};

enum class HeadSide { Left, Right };
enum class HeadHint { Auto, Left, Right };
enum class HeadCanonical { Keep, Left, Right };

std::string to_string(HeadSide side);
HeadSide opposite(HeadSide side);

/// Affine map p' = [a b; c d] p + t.
struct Affine2 {
    double a = 1.0, b = 0.0, tx = 0.0;
    double c = 0.0, d = 1.0, ty = 0.0;

    Point2 apply(Point2 p) const { return {a * p.x + b * p.y + tx, c * p.x + d * p.y + ty}; }
    Affine2 then(const Affine2& next) const;
};

struct AlignConfig {
    double margin_fraction = 0.02;
    double isotropy_epsilon = 0.05;
    HeadHint head = HeadHint::Auto;
    HeadCanonical canonical = HeadCanonical::Keep;
};

struct AlignedFish {
    Image image;
    BinaryMask mask;
    double rotation_deg = 0.0;          // rotation about the centroid, (-180, 180]
    HeadSide head_side = HeadSide::Left;  // side of the head in the output raster
    bool flipped = false;               // mirrored after rotation to reach the canonical side
    Affine2 source_to_aligned;
};

struct FallbackSegmentationConfig {
    double color_distance = 60.0;  // RGB distance from the background model
    int border = 4;                // border band sampled for the background color
    int morph_kernel = 5;          // elliptical open/close kernel diameter, odd
};

/// Classical foreground extraction for images without a precomputed mask:
/// threshold against the median border color, open/close, keep the largest
/// 8-connected component.
BinaryMask mask_from_color_fallback(const Image& image, const FallbackSegmentationConfig& config = {});

BoundingBox bbox_from_mask(const BinaryMask& mask);

/// Mean, covariance (normalized by the foreground count) and closed-form
/// eigen-decomposition of the foreground pixel coordinates.
ShapeStats shape_stats(const BinaryMask& mask, double isotropy_epsilon = 0.05);

/// Head side of a horizontally aligned mask: the half (split at the
/// centroid column) holding more foreground.
HeadSide estimate_head_side(const BinaryMask& mask);

AlignedFish align_horizontal(const Image& image, const BinaryMask& mask, const AlignConfig& config = {});

/// `image_id cx cy w h` records.
void write_box_record(std::ostream& out, const std::string& image_id, const BoundingBox& box);
std::vector<std::pair<std::string, BoundingBox>> parse_box_records(std::istream& in, const std::string& source);

}  // namespace fishpart
