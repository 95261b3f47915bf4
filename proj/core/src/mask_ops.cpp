#include "fishpart/mask_ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <istream>
#include <ostream>

#include <opencv2/imgproc.hpp>

#include "fishpart/error.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double normalize_deg(double deg) {
    while (deg > 180.0) deg -= 360.0;
    while (deg <= -180.0) deg += 360.0;
    return deg;
}

struct PixelBounds {
    int x0 = std::numeric_limits<int>::max();
    int y0 = std::numeric_limits<int>::max();
    int x1 = std::numeric_limits<int>::min();
    int y1 = std::numeric_limits<int>::min();
    bool valid() const { return x0 <= x1; }
};

PixelBounds foreground_bounds(const BinaryMask& mask) {
    PixelBounds b;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            b.x0 = std::min(b.x0, x);
            b.x1 = std::max(b.x1, x);
            b.y0 = std::min(b.y0, y);
            b.y1 = std::max(b.y1, y);
        }
    }
    return b;
}

}  // namespace

std::string to_string(HeadSide side) { return side == HeadSide::Left ? "left" : "right"; }
HeadSide opposite(HeadSide side) { return side == HeadSide::Left ? HeadSide::Right : HeadSide::Left; }

double ShapeStats::axis_angle_deg() const { return std::atan2(principal_axis.y, principal_axis.x) * kDegPerRad; }

Affine2 Affine2::then(const Affine2& n) const {
    return {n.a * a + n.b * c, n.a * b + n.b * d, n.a * tx + n.b * ty + n.tx,
            n.c * a + n.d * c, n.c * b + n.d * d, n.c * tx + n.d * ty + n.ty};
}

BinaryMask mask_from_color_fallback(const Image& image, const FallbackSegmentationConfig& config) {
    if (image.empty()) throw Error(ErrorCode::InvalidArgument, "empty image");
    if (config.morph_kernel < 1 || config.morph_kernel % 2 == 0) {
        throw Error(ErrorCode::InvalidArgument, "morphology kernel must be a positive odd size");
    }

    const int band = std::max(1, std::min({config.border, image.width() / 2, image.height() / 2}));
    std::array<std::vector<std::uint8_t>, 3> border;
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const bool on_border = x < band || y < band || x >= image.width() - band || y >= image.height() - band;
            if (!on_border) continue;
            const Rgb v = image.at(x, y);
            for (std::size_t c = 0; c < 3; ++c) border[c].push_back(v[c]);
        }
    }
    std::array<double, 3> background{};
    for (std::size_t c = 0; c < 3; ++c) {
        auto& values = border[c];
        const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
        std::nth_element(values.begin(), mid, values.end());
        background[c] = *mid;
    }

    cv::Mat binary(image.height(), image.width(), CV_8UC1, cv::Scalar(0));
    const double limit2 = config.color_distance * config.color_distance;
    for (int y = 0; y < image.height(); ++y) {
        auto* row = binary.ptr<std::uint8_t>(y);
        for (int x = 0; x < image.width(); ++x) {
            const Rgb v = image.at(x, y);
            double d2 = 0.0;
            for (std::size_t c = 0; c < 3; ++c) {
                const double diff = v[c] - background[c];
                d2 += diff * diff;
            }
            row[x] = d2 > limit2 ? 255 : 0;
        }
    }

    const cv::Mat kernel = cv::getStructuringElement(cv::MORPH_ELLIPSE, {config.morph_kernel, config.morph_kernel});
    cv::morphologyEx(binary, binary, cv::MORPH_OPEN, kernel);
    cv::morphologyEx(binary, binary, cv::MORPH_CLOSE, kernel);

    cv::Mat labels, stats, centroids;
    const int n = cv::connectedComponentsWithStats(binary, labels, stats, centroids, 8, CV_32S);
    int best = 0;
    int best_area = 0;
    for (int i = 1; i < n; ++i) {
        const int area = stats.at<int>(i, cv::CC_STAT_AREA);
        if (area > best_area) {
            best_area = area;
            best = i;
        }
    }
    if (best == 0) throw Error(ErrorCode::NoForeground, "no pixel differs from the background model");

    BinaryMask out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        const auto* row = labels.ptr<int>(y);
        for (int x = 0; x < image.width(); ++x) out.set(x, y, row[x] == best);
    }
    return out;
}

BoundingBox bbox_from_mask(const BinaryMask& mask) {
    const PixelBounds b = foreground_bounds(mask);
    if (!b.valid()) throw Error(ErrorCode::EmptyMask, "mask has no foreground");
    return BoundingBox::from_edges(b.x0 - 0.5, b.y0 - 0.5, b.x1 + 0.5, b.y1 + 0.5);
}

__extension__ using Wide = __int128;

ShapeStats shape_stats(const BinaryMask& mask, double isotropy_epsilon) {
    // Integer moment sums are exact; the centered second moments are formed
    // from them in 128-bit arithmetic before the single division by K^2.
    Wide k = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            ++k;
            sx += x;
            sy += y;
            sxx += static_cast<Wide>(x) * x;
            sxy += static_cast<Wide>(x) * y;
            syy += static_cast<Wide>(y) * y;
        }
    }
    if (k == 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground");
    if (k < 2) throw Error(ErrorCode::DegenerateShape, "a single pixel has no principal axis");

    const double kk = static_cast<double>(k) * static_cast<double>(k);
    ShapeStats s;
    s.pixel_count = static_cast<std::size_t>(k);
    s.mean = {static_cast<double>(sx) / static_cast<double>(k), static_cast<double>(sy) / static_cast<double>(k)};
    s.cov_xx = static_cast<double>(k * sxx - sx * sx) / kk;
    s.cov_xy = static_cast<double>(k * sxy - sx * sy) / kk;
    s.cov_yy = static_cast<double>(k * syy - sy * sy) / kk;

    const double half_trace = (s.cov_xx + s.cov_yy) / 2.0;
    const double half_diff = (s.cov_xx - s.cov_yy) / 2.0;
    const double radius = std::hypot(half_diff, s.cov_xy);
    s.lambda_major = half_trace + radius;
    s.lambda_minor = std::max(0.0, half_trace - radius);

    double theta = 0.5 * std::atan2(2.0 * s.cov_xy, s.cov_xx - s.cov_yy);
    if (theta <= -std::numbers::pi / 2.0) theta += std::numbers::pi;
    s.principal_axis = {std::cos(theta), std::sin(theta)};

    if (s.lambda_major - s.lambda_minor < isotropy_epsilon * s.lambda_major) {
        throw Error(ErrorCode::DegenerateShape, "foreground is near-isotropic; principal axis undefined");
    }
    return s;
}

HeadSide estimate_head_side(const BinaryMask& mask) {
    std::size_t n = 0;
    double sum_x = 0.0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                ++n;
                sum_x += x;
            }
        }
    }
    if (n == 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground");
    const double cx = sum_x / static_cast<double>(n);
    std::size_t left = 0, right = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            if (x < cx) ++left;
            else if (x > cx) ++right;
        }
    }
    return right > left ? HeadSide::Right : HeadSide::Left;
}

AlignedFish align_horizontal(const Image& image, const BinaryMask& mask, const AlignConfig& config) {
    if (image.width() != mask.width() || image.height() != mask.height()) {
        throw Error(ErrorCode::InvalidArgument, "image and mask sizes differ");
    }
    const ShapeStats stats = shape_stats(mask, config.isotropy_epsilon);
    const double applied_deg = -stats.axis_angle_deg();
    const double phi = applied_deg / kDegPerRad;
    const double cs = std::cos(phi);
    const double sn = std::sin(phi);
    const Point2 c = stats.mean;

    // Rotation about the centroid, expressed in source coordinates:
    // q = R(phi) (p - c) + c, and its inverse for resampling.
    const auto forward = [&](double x, double y) {
        const double dx = x - c.x, dy = y - c.y;
        return Point2{cs * dx - sn * dy + c.x, sn * dx + cs * dy + c.y};
    };
    const auto inverse = [&](double x, double y) {
        const double dx = x - c.x, dy = y - c.y;
        return Point2{cs * dx + sn * dy + c.x, -sn * dx + cs * dy + c.y};
    };

    double qx0 = std::numeric_limits<double>::max(), qy0 = qx0;
    double qx1 = std::numeric_limits<double>::lowest(), qy1 = qx1;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const Point2 q = forward(x, y);
            qx0 = std::min(qx0, q.x);
            qx1 = std::max(qx1, q.x);
            qy0 = std::min(qy0, q.y);
            qy1 = std::max(qy1, q.y);
        }
    }
    const int cx0 = static_cast<int>(std::floor(qx0)) - 2;
    const int cy0 = static_cast<int>(std::floor(qy0)) - 2;
    const int cw = static_cast<int>(std::ceil(qx1)) + 3 - cx0;
    const int ch = static_cast<int>(std::ceil(qy1)) + 3 - cy0;

    const auto render_mask = [&](int ox, int oy, int w, int h) {
        BinaryMask out(w, h);
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) {
                const Point2 s = inverse(i + ox, j + oy);
                const int sx = static_cast<int>(std::lround(s.x));
                const int sy = static_cast<int>(std::lround(s.y));
                out.set(i, j, mask.at_or_false(sx, sy));
            }
        }
        return out;
    };

    const BinaryMask canvas = render_mask(cx0, cy0, cw, ch);
    const PixelBounds tight = foreground_bounds(canvas);
    if (!tight.valid()) throw Error(ErrorCode::EmptyMask, "rotation lost the foreground");
    const int longer = std::max(tight.x1 - tight.x0 + 1, tight.y1 - tight.y0 + 1);
    const int margin = static_cast<int>(std::ceil(config.margin_fraction * longer));
    const int ox = cx0 + tight.x0 - margin;
    const int oy = cy0 + tight.y0 - margin;
    const int ow = tight.x1 - tight.x0 + 1 + 2 * margin;
    const int oh = tight.y1 - tight.y0 + 1 + 2 * margin;

    AlignedFish out;
    out.mask = render_mask(ox, oy, ow, oh);
    out.image = Image(ow, oh);
    for (int j = 0; j < oh; ++j) {
        for (int i = 0; i < ow; ++i) {
            const Point2 s = inverse(i + ox, j + oy);
            const auto v = sample_bilinear(image, s.x, s.y);
            out.image.set(i, j, {static_cast<std::uint8_t>(std::lround(std::clamp(v[0], 0.0, 255.0))),
                                 static_cast<std::uint8_t>(std::lround(std::clamp(v[1], 0.0, 255.0))),
                                 static_cast<std::uint8_t>(std::lround(std::clamp(v[2], 0.0, 255.0)))});
        }
    }
    out.rotation_deg = normalize_deg(applied_deg);
    out.source_to_aligned = {cs, -sn, -cs * c.x + sn * c.y + c.x - ox,
                             sn, cs, -sn * c.x - cs * c.y + c.y - oy};

    switch (config.head) {
        case HeadHint::Auto: out.head_side = estimate_head_side(out.mask); break;
        case HeadHint::Left: out.head_side = HeadSide::Left; break;
        case HeadHint::Right: out.head_side = HeadSide::Right; break;
    }

    const bool want_flip = (config.canonical == HeadCanonical::Left && out.head_side == HeadSide::Right) ||
                           (config.canonical == HeadCanonical::Right && out.head_side == HeadSide::Left);
    if (want_flip) {
        out.mask = flip_horizontal(out.mask);
        out.image = flip_horizontal(out.image);
        out.head_side = opposite(out.head_side);
        out.flipped = true;
        const Affine2 mirror{-1.0, 0.0, static_cast<double>(ow - 1), 0.0, 1.0, 0.0};
        out.source_to_aligned = out.source_to_aligned.then(mirror);
    }
    return out;
}

void write_box_record(std::ostream& out, const std::string& image_id, const BoundingBox& box) {
    out << image_id << ' ' << format_number(box.cx) << ' ' << format_number(box.cy) << ' ' << format_number(box.w)
        << ' ' << format_number(box.h) << '\n';
}

std::vector<std::pair<std::string, BoundingBox>> parse_box_records(std::istream& in, const std::string& source) {
    std::vector<std::pair<std::string, BoundingBox>> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (fields.size() != 5) throw Error(ErrorCode::Parse, where + ": expected `image_id cx cy w h`");
        const BoundingBox box{parse_number(fields[1], where), parse_number(fields[2], where),
                              parse_number(fields[3], where), parse_number(fields[4], where)};
        if (!(box.w > 0.0) || !(box.h > 0.0)) throw Error(ErrorCode::Parse, where + ": box must have positive size");
        records.emplace_back(fields[0], box);
    }
    return records;
}

}  // namespace fishpart
