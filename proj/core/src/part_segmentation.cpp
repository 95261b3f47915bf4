#include "fishpart/part_segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "fishpart/error.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double normalize_axis_deg(double deg) {
    while (deg > 90.0) deg -= 180.0;
    while (deg <= -90.0) deg += 180.0;
    return deg;
}

std::vector<double> moving_average(const std::vector<double>& values, int window) {
    const int n = static_cast<int>(values.size());
    const int half = window / 2;
    std::vector<double> out(values.size());
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += values[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return out;
}

double interpolate(const std::vector<double>& values, double offset) {
    const double clamped = std::clamp(offset, 0.0, static_cast<double>(values.size() - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(clamped));
    const std::size_t i1 = std::min(i0 + 1, values.size() - 1);
    const double f = clamped - static_cast<double>(i0);
    return (1.0 - f) * values[i0] + f * values[i1];
}

BoundaryProfile mirrored(const BoundaryProfile& p) {
    BoundaryProfile m = p;
    m.x_left = p.mask_width - 1 - p.x_right;
    m.x_right = p.mask_width - 1 - p.x_left;
    std::reverse(m.upper.begin(), m.upper.end());
    std::reverse(m.lower.begin(), m.lower.end());
    std::reverse(m.upper_smoothed.begin(), m.upper_smoothed.end());
    std::reverse(m.lower_smoothed.begin(), m.lower_smoothed.end());
    return m;
}

Point2 mirror_point(Point2 p, int width) { return {static_cast<double>(width - 1) - p.x, p.y}; }

FeaturePointSet mirror_points(const FeaturePointSet& f, int width) {
    FeaturePointSet m = f;
    m.tail_up = mirror_point(f.tail_up, width);
    m.tail_low = mirror_point(f.tail_low, width);
    m.tail_center = mirror_point(f.tail_center, width);
    m.head_center = mirror_point(f.head_center, width);
    m.head_up = mirror_point(f.head_up, width);
    m.head_low = mirror_point(f.head_low, width);
    m.snout = mirror_point(f.snout, width);
    m.head_side = opposite(f.head_side);
    return m;
}

EllipseParams mirror_ellipse(const EllipseParams& e, int width) {
    EllipseParams m = e;
    m.center = mirror_point(e.center, width);
    m.axis_angle_deg = normalize_axis_deg(-e.axis_angle_deg);
    return m;
}

PartRegions mirror_regions(const PartRegions& r, int width) {
    PartRegions m = r;
    m.points = mirror_points(r.points, width);
    m.head = mirror_ellipse(r.head, width);
    m.body = mirror_ellipse(r.body, width);
    m.fin_envelope = mirror_ellipse(r.fin_envelope, width);
    m.tail_circle.center = mirror_point(r.tail_circle.center, width);
    return m;
}

struct Notch {
    double offset = 0.0;  // column offset from x_left, sub-pixel
    double depth = -1.0;
};

// Deepest local minimum of the outward extent inside [start, n). A column
// qualifies when nothing in its neighbourhood lies lower and the
// neighbourhood is not flat; depth is measured against the lower of the two
// enclosing maxima. Equal depths resolve toward the tail tip.
Notch deepest_notch(const std::vector<double>& extent, std::size_t start, const PartSegConfig& config) {
    const int n = static_cast<int>(extent.size());
    const int r = config.extremum_radius;
    std::vector<double> left_max(extent.size()), right_max(extent.size());
    double running = -std::numeric_limits<double>::infinity();
    for (int i = static_cast<int>(start); i < n; ++i) {
        running = std::max(running, extent[static_cast<std::size_t>(i)]);
        left_max[static_cast<std::size_t>(i)] = running;
    }
    running = -std::numeric_limits<double>::infinity();
    for (int i = n - 1; i >= static_cast<int>(start); --i) {
        running = std::max(running, extent[static_cast<std::size_t>(i)]);
        right_max[static_cast<std::size_t>(i)] = running;
    }

    Notch best;
    int best_index = -1;
    for (int i = static_cast<int>(start); i < n; ++i) {
        const double v = extent[static_cast<std::size_t>(i)];
        double lo = v, hi = v;
        for (int j = std::max(0, i - r); j <= std::min(n - 1, i + r); ++j) {
            lo = std::min(lo, extent[static_cast<std::size_t>(j)]);
            hi = std::max(hi, extent[static_cast<std::size_t>(j)]);
        }
        if (v > lo || !(hi > v)) continue;
        const double depth = std::min(left_max[static_cast<std::size_t>(i)], right_max[static_cast<std::size_t>(i)]) - v;
        if (depth >= best.depth) {
            best.depth = depth;
            best_index = i;
        }
    }
    if (best_index < 0) return best;

    double delta = 0.0;
    if (best_index > 0 && best_index + 1 < n) {
        const double a = extent[static_cast<std::size_t>(best_index - 1)];
        const double b = extent[static_cast<std::size_t>(best_index)];
        const double c = extent[static_cast<std::size_t>(best_index + 1)];
        const double curvature = a - 2.0 * b + c;
        if (curvature > 0.0) delta = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
    }
    best.offset = best_index + delta;
    return best;
}

FeaturePointSet tail_points_head_left(const BoundaryProfile& p, const PartSegConfig& config) {
    const std::size_t n = p.columns();
    const double extent = static_cast<double>(p.x_right - p.x_left);
    const auto start = static_cast<std::size_t>(std::ceil((1.0 - config.search_window) * extent));
    if (n < 3 || start >= n) throw Error(ErrorCode::NoTailNotch, "profile too short for a tail search");

    std::vector<double> up_extent(n), low_extent(n);
    for (std::size_t i = 0; i < n; ++i) {
        up_extent[i] = -p.upper_smoothed[i];
        low_extent[i] = p.lower_smoothed[i];
    }
    const Notch up = deepest_notch(up_extent, start, config);
    const Notch low = deepest_notch(low_extent, start, config);
    if (up.depth < config.min_notch_depth || low.depth < config.min_notch_depth) {
        throw Error(ErrorCode::NoTailNotch, "no concave notch on the tail side of the boundary");
    }

    FeaturePointSet f;
    f.head_side = HeadSide::Left;
    f.tail_up = {p.x_left + up.offset, interpolate(p.upper, up.offset)};
    f.tail_low = {p.x_left + low.offset, interpolate(p.lower, low.offset)};
    f.tail_center = midpoint(f.tail_up, f.tail_low);
    f.tail_length = static_cast<double>(p.x_right) - f.tail_center.x;
    f.tail_thickness = distance(f.tail_up, f.tail_low);
    if (!(f.tail_length > 0.0)) throw Error(ErrorCode::NoTailNotch, "notch coincides with the tail tip");
    return f;
}

void head_points_head_left(const BoundaryProfile& p, FeaturePointSet& f, const PartSegConfig& config) {
    const double offset = config.head_offset * f.tail_length;
    if (!(offset > 0.0) || offset > static_cast<double>(p.x_right - p.x_left)) {
        throw Error(ErrorCode::GeometryError, "head center falls outside the fish extent");
    }
    const double x = p.x_left + offset;
    f.snout = {static_cast<double>(p.x_left), (p.upper.front() + p.lower.front()) / 2.0};
    f.head_up = {x, interpolate(p.upper, offset)};
    f.head_low = {x, interpolate(p.lower, offset)};
    f.head_center = midpoint(f.head_up, f.head_low);
}

bool ellipse_inside(const EllipseParams& inner, const EllipseParams& outer) {
    constexpr int kSamples = 360;
    const double t = inner.axis_angle_deg / kDegPerRad;
    const double ct = std::cos(t), st = std::sin(t);
    for (int i = 0; i < kSamples; ++i) {
        const double a = 2.0 * std::numbers::pi * i / kSamples;
        const double u = inner.semi_major * std::cos(a), v = inner.semi_minor * std::sin(a);
        const Point2 q{inner.center.x + u * ct - v * st, inner.center.y + u * st + v * ct};
        if (!outer.contains(q)) return false;
    }
    return true;
}

// Largest factor in (0, 1] applied through `make` that keeps the ellipse in `outer`.
template <class Make>
double largest_fitting_scale(const EllipseParams& outer, Make make) {
    if (ellipse_inside(make(1.0), outer)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 48; ++i) {
        const double mid = (lo + hi) / 2.0;
        if (ellipse_inside(make(mid), outer)) lo = mid;
        else hi = mid;
    }
    if (!(lo > 0.0)) throw Error(ErrorCode::GeometryError, "body ellipse cannot fit inside the fin envelope");
    return lo;
}

struct CentralMass {
    std::vector<Point2> pixels;
    Point2 mean;
};

// Foreground from the snout up to the start of the caudal peduncle: the
// first column past the centroid whose chord narrows to `peduncle_ratio`
// tail thicknesses, or the tail center when the chord never narrows.
CentralMass central_mass(const BinaryMask& mask, const BoundaryProfile& p, const FeaturePointSet& f,
                         const PartSegConfig& config) {
    double sum_x = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                sum_x += x;
                ++n;
            }
        }
    }
    const double centroid_x = sum_x / static_cast<double>(n);
    double cut = f.tail_center.x;
    const double narrow = config.peduncle_ratio * f.tail_thickness;
    for (int x = static_cast<int>(std::ceil(centroid_x)); x <= static_cast<int>(f.tail_center.x); ++x) {
        const auto i = static_cast<std::size_t>(x - p.x_left);
        if (p.lower[i] - p.upper[i] <= narrow) {
            cut = x;
            break;
        }
    }

    CentralMass m;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = p.x_left; x <= static_cast<int>(std::floor(cut)); ++x) {
            if (mask.at(x, y)) m.pixels.push_back({static_cast<double>(x), static_cast<double>(y)});
        }
    }
    if (m.pixels.size() < 2) throw Error(ErrorCode::GeometryError, "too few body pixels for a moment fit");
    for (const Point2& q : m.pixels) {
        m.mean.x += q.x;
        m.mean.y += q.y;
    }
    m.mean.x /= static_cast<double>(m.pixels.size());
    m.mean.y /= static_cast<double>(m.pixels.size());
    return m;
}

PartRegions regions_head_left(const BinaryMask& mask, const BoundaryProfile& p, const FeaturePointSet& tail,
                              BodyProfile kind, const PartSegConfig& config) {
    PartRegions r;
    r.profile = kind;
    r.points = tail;
    head_points_head_left(p, r.points, config);
    const FeaturePointSet& f = r.points;

    const double chord = distance(f.head_up, f.head_low);
    r.head = EllipseParams::from_axes(f.head_center, f.tail_length, chord, 0.0);

    // Fin envelope: horizontal axis from the snout to the tail center,
    // vertical axis sized to pass through the head chord end points.
    const double a = (f.tail_center.x - f.snout.x) / 2.0;
    if (!(a > 0.0)) throw Error(ErrorCode::GeometryError, "tail center lies at or before the snout");
    const Point2 envelope_center{f.snout.x + a, (f.head_center.y + f.tail_center.y) / 2.0};
    const double u = (f.head_center.x - envelope_center.x) / a;
    if (std::abs(u) >= 1.0) throw Error(ErrorCode::GeometryError, "head chord lies outside the fin envelope span");
    const double b = (chord / 2.0) / std::sqrt(1.0 - u * u);
    r.fin_envelope = EllipseParams::from_axes(envelope_center, 2.0 * a, 2.0 * b, 0.0);

    const CentralMass mass = central_mass(mask, p, f, config);
    if (kind == BodyProfile::Flatfish) {
        double vx = 0.0, vy = 0.0;
        for (const Point2& q : mass.pixels) {
            vx += (q.x - mass.mean.x) * (q.x - mass.mean.x);
            vy += (q.y - mass.mean.y) * (q.y - mass.mean.y);
        }
        const double count = static_cast<double>(mass.pixels.size());
        const double horizontal = 4.0 * std::sqrt(vx / count);  // full axis = 2 * (2 sigma)
        const double vertical = 4.0 * std::sqrt(vy / count);
        const auto make = [&](double s) {
            return EllipseParams::from_axes(mass.mean, s * horizontal, s * vertical, 0.0);
        };
        r.body = make(largest_fitting_scale(r.fin_envelope, make));
    } else {
        // Major axis joins the head and tail mean-points; the minor axis
        // comes from the spread of the body about that line.
        const Point2 center = midpoint(f.head_center, f.tail_center);
        const double len = distance(f.head_center, f.tail_center);
        if (!(len > 0.0)) throw Error(ErrorCode::GeometryError, "head and tail mean-points coincide");
        const double ux = (f.tail_center.x - f.head_center.x) / len;
        const double uy = (f.tail_center.y - f.head_center.y) / len;
        double spread = 0.0;
        for (const Point2& q : mass.pixels) {
            const double d = ux * (q.y - center.y) - uy * (q.x - center.x);
            spread += d * d;
        }
        const double minor = 4.0 * std::sqrt(spread / static_cast<double>(mass.pixels.size()));
        r.body = EllipseParams::from_axes(center, len, minor, std::atan2(uy, ux) * kDegPerRad);
    }

    r.tail_circle = {f.tail_center, config.tail_circle * f.tail_thickness};
    if (!(r.tail_circle.radius > 0.0)) throw Error(ErrorCode::GeometryError, "tail circle has no radius");
    return r;
}

void check_config(const PartSegConfig& c) {
    if (!(c.search_window > 0.0 && c.search_window <= 1.0) || c.smoothing_window < 1 || c.smoothing_window % 2 == 0 ||
        c.extremum_radius < 1 || c.max_column_gap < 0 || !(c.head_offset > 0.0) || !(c.tail_circle > 0.0) ||
        !(c.peduncle_ratio > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "part segmentation constants out of range");
    }
}

}  // namespace

std::string to_string(PartLabel label) {
    switch (label) {
        case PartLabel::Background: return "background";
        case PartLabel::Head: return "head";
        case PartLabel::Fins: return "fins";
        case PartLabel::Body: return "body";
    }
    return "background";
}

std::string to_string(BodyProfile profile) { return profile == BodyProfile::Flatfish ? "flatfish" : "fusiform"; }

std::vector<Point2> BoundaryProfile::upper_points() const {
    std::vector<Point2> out;
    for (std::size_t i = 0; i < upper.size(); ++i) out.push_back({static_cast<double>(x_left) + static_cast<double>(i), upper[i]});
    return out;
}

std::vector<Point2> BoundaryProfile::lower_points() const {
    std::vector<Point2> out;
    for (std::size_t i = 0; i < lower.size(); ++i) out.push_back({static_cast<double>(x_left) + static_cast<double>(i), lower[i]});
    return out;
}

double BoundaryProfile::upper_at(double x) const { return interpolate(upper, x - x_left); }
double BoundaryProfile::lower_at(double x) const { return interpolate(lower, x - x_left); }

bool EllipseParams::contains(Point2 p) const {
    const double t = axis_angle_deg / kDegPerRad;
    const double dx = p.x - center.x, dy = p.y - center.y;
    const double u = dx * std::cos(t) + dy * std::sin(t);
    const double v = -dx * std::sin(t) + dy * std::cos(t);
    return (u * u) / (semi_major * semi_major) + (v * v) / (semi_minor * semi_minor) <= 1.0 + 1e-12;
}

EllipseParams EllipseParams::from_axes(Point2 center, double first_axis_length, double second_axis_length,
                                       double first_axis_deg) {
    if (!(first_axis_length > 0.0) || !(second_axis_length > 0.0) || !std::isfinite(first_axis_length) ||
        !std::isfinite(second_axis_length)) {
        throw Error(ErrorCode::GeometryError, "ellipse axis length must be positive");
    }
    EllipseParams e;
    e.center = center;
    if (first_axis_length >= second_axis_length) {
        e.semi_major = first_axis_length / 2.0;
        e.semi_minor = second_axis_length / 2.0;
        e.axis_angle_deg = normalize_axis_deg(first_axis_deg);
    } else {
        e.semi_major = second_axis_length / 2.0;
        e.semi_minor = first_axis_length / 2.0;
        e.axis_angle_deg = normalize_axis_deg(first_axis_deg + 90.0);
    }
    return e;
}

PartLabelMap::PartLabelMap(int width, int height) : width_(width), height_(height) {
    labels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::array<std::size_t, 4> PartLabelMap::counts() const {
    std::array<std::size_t, 4> c{};
    for (std::uint8_t v : labels_) {
        if (v < 4) ++c[v];
    }
    return c;
}

PartLabelMap PartLabelMap::from_indexed(int width, int height, std::vector<std::uint8_t> values) {
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::InvalidArgument, "label raster size mismatch");
    }
    for (std::uint8_t v : values) {
        if (v > 3) throw Error(ErrorCode::Parse, "label value " + std::to_string(v) + " is not a part index");
    }
    PartLabelMap m;
    m.width_ = width;
    m.height_ = height;
    m.labels_ = std::move(values);
    return m;
}

BoundaryProfile extract_boundary(const BinaryMask& mask, const PartSegConfig& config) {
    check_config(config);
    BoundaryProfile p;
    p.mask_width = mask.width();
    p.mask_height = mask.height();
    std::vector<int> top(static_cast<std::size_t>(mask.width()), -1), bottom(static_cast<std::size_t>(mask.width()), -1);
    int first = -1, last = -1;
    for (int x = 0; x < mask.width(); ++x) {
        for (int y = 0; y < mask.height(); ++y) {
            if (!mask.at(x, y)) continue;
            if (top[static_cast<std::size_t>(x)] < 0) top[static_cast<std::size_t>(x)] = y;
            bottom[static_cast<std::size_t>(x)] = y;
        }
        if (top[static_cast<std::size_t>(x)] >= 0) {
            if (first < 0) first = x;
            last = x;
        }
    }
    if (first < 0) throw Error(ErrorCode::EmptyMask, "mask has no foreground");
    p.x_left = first;
    p.x_right = last;

    const auto n = static_cast<std::size_t>(last - first + 1);
    p.upper.resize(n);
    p.lower.resize(n);
    std::size_t i = 0;
    while (i < n) {
        const auto x = static_cast<std::size_t>(first) + i;
        if (top[x] >= 0) {
            p.upper[i] = top[x];
            p.lower[i] = bottom[x];
            ++i;
            continue;
        }
        std::size_t j = i;
        while (top[static_cast<std::size_t>(first) + j] < 0) ++j;  // the last column is foreground
        if (static_cast<int>(j - i) > config.max_column_gap) {
            throw Error(ErrorCode::FragmentedMask, "gap of " + std::to_string(j - i) + " empty columns at x=" +
                                                       std::to_string(first + static_cast<int>(i)));
        }
        const double u0 = p.upper[i - 1], l0 = p.lower[i - 1];
        const double u1 = top[static_cast<std::size_t>(first) + j], l1 = bottom[static_cast<std::size_t>(first) + j];
        for (std::size_t k = i; k < j; ++k) {
            const double t = static_cast<double>(k - i + 1) / static_cast<double>(j - i + 1);
            p.upper[k] = u0 + t * (u1 - u0);
            p.lower[k] = l0 + t * (l1 - l0);
        }
        i = j;
    }
    p.upper_smoothed = moving_average(p.upper, config.smoothing_window);
    p.lower_smoothed = moving_average(p.lower, config.smoothing_window);
    return p;
}

FeaturePointSet find_tail_points(const BoundaryProfile& profile, HeadSide head_side, const PartSegConfig& config) {
    check_config(config);
    if (profile.columns() == 0) throw Error(ErrorCode::EmptyMask, "empty boundary profile");
    if (head_side == HeadSide::Left) return tail_points_head_left(profile, config);
    return mirror_points(tail_points_head_left(mirrored(profile), config), profile.mask_width);
}

void find_head_points(const BoundaryProfile& profile, FeaturePointSet& points, const PartSegConfig& config) {
    check_config(config);
    if (points.head_side == HeadSide::Left) {
        head_points_head_left(profile, points, config);
        return;
    }
    FeaturePointSet local = mirror_points(points, profile.mask_width);
    head_points_head_left(mirrored(profile), local, config);
    points = mirror_points(local, profile.mask_width);
}

PartRegions fit_part_regions(const BinaryMask& mask, const FeaturePointSet& points, BodyProfile profile_kind,
                             const PartSegConfig& config) {
    if (!(points.tail_length > 0.0) || !(points.tail_thickness > 0.0)) {
        throw Error(ErrorCode::GeometryError, "tail length and thickness must be positive");
    }
    if (points.head_side == HeadSide::Left) {
        return regions_head_left(mask, extract_boundary(mask, config), points, profile_kind, config);
    }
    const BinaryMask flipped = flip_horizontal(mask);
    const PartRegions local = regions_head_left(flipped, extract_boundary(flipped, config),
                                                mirror_points(points, mask.width()), profile_kind, config);
    return mirror_regions(local, mask.width());
}

PartLabelMap rasterize_part_labels(const BinaryMask& mask, const PartRegions& regions) {
    PartLabelMap labels(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            const Point2 p{static_cast<double>(x), static_cast<double>(y)};
            // The tail circle lies in the fins, which already take every
            // pixel the head and body leave over.
            if (regions.head.contains(p)) labels.set(x, y, PartLabel::Head);
            else if (regions.body.contains(p)) labels.set(x, y, PartLabel::Body);
            else labels.set(x, y, PartLabel::Fins);
        }
    }
    return labels;
}

PartLabel assign_box_to_part(const BoundingBox& box, const PartLabelMap& labels) {
    const int x_begin = std::max(0, static_cast<int>(std::ceil(box.x0())));
    const int y_begin = std::max(0, static_cast<int>(std::ceil(box.y0())));
    const int x_end = std::min(labels.width(), static_cast<int>(std::ceil(box.x1())));
    const int y_end = std::min(labels.height(), static_cast<int>(std::ceil(box.y1())));
    std::array<std::size_t, 4> votes{};
    for (int y = y_begin; y < y_end; ++y) {
        for (int x = x_begin; x < x_end; ++x) ++votes[static_cast<std::size_t>(labels.at(x, y))];
    }
    const std::size_t head = votes[1], fins = votes[2], body = votes[3];
    if (head + fins + body == 0) throw Error(ErrorCode::NoOverlap, "box covers no foreground");
    if (head >= fins && head >= body) return PartLabel::Head;
    if (fins >= body) return PartLabel::Fins;
    return PartLabel::Body;
}

PartSegmentation segment_parts(const BinaryMask& mask, HeadSide head_side, BodyProfile profile_kind,
                               const PartSegConfig& config) {
    PartSegmentation s;
    s.boundary = extract_boundary(mask, config);
    const FeaturePointSet tail = find_tail_points(s.boundary, head_side, config);
    s.regions = fit_part_regions(mask, tail, profile_kind, config);
    s.labels = rasterize_part_labels(mask, s.regions);
    return s;
}

namespace {

void put_point(std::ostream& out, const char* key, Point2 p) {
    out << key << ' ' << format_number(p.x) << ' ' << format_number(p.y) << '\n';
}

void put_ellipse(std::ostream& out, const char* key, const EllipseParams& e) {
    out << key << ' ' << format_number(e.center.x) << ' ' << format_number(e.center.y) << ' '
        << format_number(e.semi_major) << ' ' << format_number(e.semi_minor) << ' ' << format_number(e.axis_angle_deg)
        << '\n';
}

}  // namespace

void write_part_record(std::ostream& out, const PartRegions& r) {
    out << "profile " << to_string(r.profile) << '\n';
    out << "head_side " << to_string(r.points.head_side) << '\n';
    put_point(out, "tail_up", r.points.tail_up);
    put_point(out, "tail_low", r.points.tail_low);
    put_point(out, "tail_center", r.points.tail_center);
    out << "tail_length " << format_number(r.points.tail_length) << '\n';
    out << "tail_thickness " << format_number(r.points.tail_thickness) << '\n';
    put_point(out, "snout", r.points.snout);
    put_point(out, "head_center", r.points.head_center);
    put_point(out, "head_up", r.points.head_up);
    put_point(out, "head_low", r.points.head_low);
    put_ellipse(out, "head_ellipse", r.head);
    put_ellipse(out, "body_ellipse", r.body);
    put_ellipse(out, "fin_envelope", r.fin_envelope);
    out << "tail_circle " << format_number(r.tail_circle.center.x) << ' ' << format_number(r.tail_circle.center.y) << ' '
        << format_number(r.tail_circle.radius) << '\n';
}

PartRegions parse_part_record(std::istream& in, const std::string& source) {
    std::map<std::string, std::vector<std::string>> entries;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty()) continue;
        std::string key = fields.front();
        fields.erase(fields.begin());
        entries[key] = std::move(fields);
    }
    const auto need = [&](const std::string& key, std::size_t n) -> const std::vector<std::string>& {
        const auto it = entries.find(key);
        if (it == entries.end() || it->second.size() != n) {
            throw Error(ErrorCode::Parse, source + ": missing or malformed `" + key + "`");
        }
        return it->second;
    };
    const auto num = [&](const std::string& key, std::size_t i, std::size_t n) {
        return parse_number(need(key, n)[i], source + ": " + key);
    };
    const auto point = [&](const std::string& key) { return Point2{num(key, 0, 2), num(key, 1, 2)}; };
    const auto ellipse = [&](const std::string& key) {
        EllipseParams e;
        e.center = {num(key, 0, 5), num(key, 1, 5)};
        e.semi_major = num(key, 2, 5);
        e.semi_minor = num(key, 3, 5);
        e.axis_angle_deg = num(key, 4, 5);
        return e;
    };

    PartRegions r;
    const std::string profile = need("profile", 1)[0];
    if (profile == "flatfish") r.profile = BodyProfile::Flatfish;
    else if (profile == "fusiform") r.profile = BodyProfile::Fusiform;
    else throw Error(ErrorCode::Parse, source + ": unknown profile " + profile);
    const std::string side = need("head_side", 1)[0];
    if (side != "left" && side != "right") throw Error(ErrorCode::Parse, source + ": unknown head side " + side);
    r.points.head_side = side == "left" ? HeadSide::Left : HeadSide::Right;
    r.points.tail_up = point("tail_up");
    r.points.tail_low = point("tail_low");
    r.points.tail_center = point("tail_center");
    r.points.tail_length = num("tail_length", 0, 1);
    r.points.tail_thickness = num("tail_thickness", 0, 1);
    r.points.snout = point("snout");
    r.points.head_center = point("head_center");
    r.points.head_up = point("head_up");
    r.points.head_low = point("head_low");
    r.head = ellipse("head_ellipse");
    r.body = ellipse("body_ellipse");
    r.fin_envelope = ellipse("fin_envelope");
    r.tail_circle = {{num("tail_circle", 0, 3), num("tail_circle", 1, 3)}, num("tail_circle", 2, 3)};
    return r;
}

}  // namespace fishpart
