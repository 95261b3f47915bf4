#include "fishpart/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fishpart/error.hpp"
#include "fishpart/random.hpp"

namespace fishpart {
namespace {

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

// Half-height of one side (upper or lower) of the outline along the
// construction axis u, head at -a.
struct SideProfile {
    double a = 0.0;       // ellipse semi-axis along u
    double b = 0.0;       // ellipse semi-axis across
    double x_join = 0.0;  // taper starts on the ellipse here
    double h_join = 0.0;
    double x_notch = 0.0;
    double h_notch = 0.0;
    double x_tip = 0.0;
    double flare_slope = 0.0;

    double ellipse(double u) const {
        const double t = u / a;
        return std::abs(t) < 1.0 ? b * std::sqrt(1.0 - t * t) : 0.0;
    }
    double height(double u) const {
        if (u < -a || u > x_tip) return -1.0;
        double h = ellipse(u);
        if (u >= x_join && u <= x_notch) {
            h = std::max(h, h_join + (h_notch - h_join) * (u - x_join) / (x_notch - x_join));
        } else if (u > x_notch) {
            h = std::max(h, h_notch + flare_slope * (u - x_notch));
        }
        return h;
    }
};

SideProfile make_side(double a, double b, double x_notch, double x_tip, double pinch, double flare_factor) {
    SideProfile s;
    s.a = a;
    s.b = b;
    s.x_join = 0.92 * a;
    s.h_join = s.ellipse(s.x_join);
    s.x_notch = x_notch;
    s.h_notch = s.h_join * pinch;
    s.x_tip = x_tip;
    s.flare_slope = (s.h_join - s.h_notch) / (x_notch - s.x_join) * flare_factor;
    return s;
}

struct Outline {
    SideProfile upper;
    SideProfile lower;
    bool inside(double u, double v) const {
        const double h = v < 0.0 ? upper.height(u) : lower.height(u);
        return h >= 0.0 && std::abs(v) <= h;
    }
};

}  // namespace

SyntheticFish make_synthetic_fish(std::uint64_t seed, const SyntheticConfig& config) {
    if (!(config.scale > 0.0) || config.margin < 0) throw Error(ErrorCode::InvalidArgument, "synthetic fish config out of range");
    Rng rng(seed);
    const double s = config.scale;
    Outline o;
    double a = 0.0, b_up = 0.0, b_low = 0.0;
    if (config.profile == BodyProfile::Flatfish) {
        a = rng.uniform(95.0, 125.0) * s;
        b_up = b_low = a * rng.uniform(0.45, 0.52);
    } else {
        a = rng.uniform(140.0, 170.0) * s;
        b_up = a * rng.uniform(0.20, 0.24);
        b_low = b_up * rng.uniform(0.75, 0.85);
    }
    const double x_notch = a + rng.uniform(10.0, 15.0) * s;
    const double tail = rng.uniform(28.0, 38.0) * s;
    const double x_tip = x_notch + tail;
    const double pinch_up = rng.uniform(0.35, 0.45);
    const double flare_up = rng.uniform(0.9, 1.3);
    if (config.profile == BodyProfile::Flatfish) {
        o.upper = make_side(a, b_up, x_notch, x_tip, pinch_up, flare_up);
        o.lower = o.upper;
    } else {
        o.upper = make_side(a, b_up, x_notch, x_tip, pinch_up, flare_up);
        o.lower = make_side(a, b_low, x_notch, x_tip, rng.uniform(0.35, 0.45), rng.uniform(0.9, 1.3));
    }
    const double half_height = std::max({b_up, b_low, o.upper.height(x_tip), o.lower.height(x_tip)});

    // Place the construction frame: mirror for head-right, rotate, then fit
    // the canvas around the rotated extent with a sub-pixel offset.
    const double theta = config.rotation_deg * std::numbers::pi / 180.0;
    const double mirror = config.head_side == HeadSide::Right ? -1.0 : 1.0;
    // y grows downward, so a counter-clockwise turn on screen uses -theta.
    const double cs = std::cos(theta), sn = std::sin(theta);
    Affine2 local{mirror * cs, sn, 0.0, -mirror * sn, cs, 0.0};
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (double u : {-a, x_tip}) {
        for (double v : {-half_height, half_height}) {
            const Point2 p = local.apply({u, v});
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
    }
    const int width = static_cast<int>(std::ceil(max_x - min_x)) + 2 * config.margin + 2;
    const int height = static_cast<int>(std::ceil(max_y - min_y)) + 2 * config.margin + 2;
    local.tx = config.margin + 0.5 - min_x + rng.uniform01();
    local.ty = config.margin + 0.5 - min_y + rng.uniform01();
    // Inverse of the orthonormal part, for pixel centers back to (u, v).
    const auto to_local = [&](double x, double y) {
        const double dx = x - local.tx, dy = y - local.ty;
        return Point2{local.a * dx + local.c * dy, local.b * dx + local.d * dy};
    };

    SyntheticFish fish;
    fish.profile = config.profile;
    fish.rotation_deg = config.rotation_deg;
    fish.head_side = config.head_side;
    fish.local_to_raster = local;
    fish.mask = BinaryMask(width, height);

    // Ground truth feature points in the construction frame.
    const double u_head = -a + 0.5 * tail;
    const Point2 tail_up{x_notch, -o.upper.h_notch}, tail_low{x_notch, o.lower.h_notch};
    const Point2 head_up{u_head, -o.upper.height(u_head)}, head_low{u_head, o.lower.height(u_head)};
    const Point2 head_center = midpoint(head_up, head_low), tail_center = midpoint(tail_up, tail_low);
    fish.truth.tail_up = local.apply(tail_up);
    fish.truth.tail_low = local.apply(tail_low);
    fish.truth.tail_center = local.apply(tail_center);
    fish.truth.tail_length = tail;
    fish.truth.tail_thickness = o.upper.h_notch + o.lower.h_notch;
    fish.truth.head_up = local.apply(head_up);
    fish.truth.head_low = local.apply(head_low);
    fish.truth.head_center = local.apply(head_center);
    fish.truth.snout = local.apply({-a, 0.0});
    fish.truth.head_side = config.head_side;

    const double axis_deg = -config.rotation_deg;  // raster angles are measured with y down
    const auto raster_ellipse = [&](Point2 c, double along, double across) {
        return EllipseParams::from_axes(local.apply(c), along, across, axis_deg);
    };
    const EllipseParams head_local = EllipseParams::from_axes(head_center, tail, head_low.y - head_up.y, 0.0);
    const EllipseParams body_local = EllipseParams::from_axes({0.0, 0.0}, 2.0 * a, 2.0 * b_up, 0.0);
    fish.head = raster_ellipse(head_center, tail, head_low.y - head_up.y);
    fish.body = raster_ellipse({0.0, 0.0}, 2.0 * a, 2.0 * b_up);

    fish.parts = PartLabelMap(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const Point2 q = to_local(x, y);
            if (!o.inside(q.x, q.y)) continue;
            fish.mask.set(x, y);
            bool in_body = body_local.contains(q);
            if (config.profile == BodyProfile::Fusiform && q.y > 0.0) {
                in_body = EllipseParams::from_axes({0.0, 0.0}, 2.0 * a, 2.0 * b_low, 0.0).contains(q);
            }
            fish.parts.set(x, y, head_local.contains(q) ? PartLabel::Head : in_body ? PartLabel::Body : PartLabel::Fins);
        }
    }

    // Water background and a textured fish, both with mild noise.
    fish.image = Image(width, height);
    const Rgb water{40, 90, 150};
    const Rgb skin = config.profile == BodyProfile::Flatfish ? Rgb{130, 100, 70} : Rgb{150, 140, 120};
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double noise = rng.uniform(-6.0, 6.0);
            Rgb out{};
            if (fish.mask.at(x, y)) {
                const Point2 q = to_local(x, y);
                const double texture = 10.0 * std::sin(q.x / 7.0 + phase) * std::cos(q.y / 5.0);
                for (std::size_t c = 0; c < 3; ++c) out[c] = clamp_byte(skin[c] + texture + noise);
            } else {
                for (std::size_t c = 0; c < 3; ++c) out[c] = clamp_byte(water[c] + noise);
            }
            fish.image.set(x, y, out);
        }
    }
    return fish;
}

PatchRecord make_disease_patch(std::uint64_t seed, int size, const std::string& patch_id) {
    if (size < 8) throw Error(ErrorCode::InvalidArgument, "disease patch must be at least 8 px");
    Rng rng(seed);
    PatchRecord patch{patch_id, Image(size, size), BinaryMask(size, size)};
    const double c = (size - 1) / 2.0;
    const double radius = 0.3 * size;
    // Radius modulated by a few low harmonics gives an irregular blob.
    double amp[3], phase[3];
    for (int k = 0; k < 3; ++k) {
        amp[k] = rng.uniform(0.0, 0.15);
        phase[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    const Rgb lesion{static_cast<std::uint8_t>(rng.between(170, 220)), static_cast<std::uint8_t>(rng.between(40, 80)),
                     static_cast<std::uint8_t>(rng.between(40, 80))};
    const Rgb margin{static_cast<std::uint8_t>(rng.between(120, 160)), static_cast<std::uint8_t>(rng.between(95, 125)),
                     static_cast<std::uint8_t>(rng.between(70, 100))};
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double angle = std::atan2(y - c, x - c);
            double r = radius;
            for (int k = 0; k < 3; ++k) r *= 1.0 + amp[k] * std::sin((k + 2) * angle + phase[k]);
            const bool inside = std::hypot(x - c, y - c) <= r;
            patch.fg_mask.set(x, y, inside);
            const Rgb base = inside ? lesion : margin;
            const double noise = rng.uniform(-8.0, 8.0);
            patch.image.set(x, y, {clamp_byte(base[0] + noise), clamp_byte(base[1] + noise), clamp_byte(base[2] + noise)});
        }
    }
    return patch;
}

}  // namespace fishpart
