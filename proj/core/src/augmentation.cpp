#include "fishpart/augmentation.hpp"

#include <algorithm>
#include <cmath>

#include "fishpart/error.hpp"
#include "fishpart/filters.hpp"
#include "fishpart/random.hpp"

namespace fishpart {
namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Vec3 multiply(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2], m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

Mat3 multiply(const Mat3& a, const Mat3& b) {
    Mat3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t k = 0; k < 3; ++k) out[i][j] += a[i][k] * b[k][j];
        }
    }
    return out;
}

Mat3 inverse(const Mat3& m) {
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    Mat3 inv{};
    inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
    inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
    inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
    inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
    inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
    inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
    inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
    inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
    inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
    return inv;
}

// Opponent l-alpha-beta axes over the LMS cone response, kept linear (no
// log) so that channel means survive the round trip back to RGB.
struct Decorrelation {
    Mat3 forward;
    Mat3 backward;
};

const Decorrelation& decorrelation() {
    static const Decorrelation d = [] {
        const Mat3 rgb_to_lms{{{0.3811, 0.5783, 0.0402}, {0.1967, 0.7244, 0.0782}, {0.0241, 0.1288, 0.8444}}};
        const double s3 = 1.0 / std::sqrt(3.0), s6 = 1.0 / std::sqrt(6.0), s2 = 1.0 / std::sqrt(2.0);
        const Mat3 lms_to_lab{{{s3, s3, s3}, {s6, s6, -2.0 * s6}, {s2, -s2, 0.0}}};
        Decorrelation out;
        out.forward = multiply(lms_to_lab, rgb_to_lms);
        out.backward = inverse(out.forward);
        return out;
    }();
    return d;
}

Vec3 to_vec(Rgb v) { return {static_cast<double>(v[0]), static_cast<double>(v[1]), static_cast<double>(v[2])}; }

std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0))); }

struct Moments {
    Vec3 mean{};
    Vec3 stddev{};
};

Moments moments(const std::vector<Vec3>& samples) {
    Moments m;
    const double n = static_cast<double>(samples.size());
    for (const Vec3& s : samples) {
        for (std::size_t c = 0; c < 3; ++c) m.mean[c] += s[c];
    }
    for (std::size_t c = 0; c < 3; ++c) m.mean[c] /= n;
    for (const Vec3& s : samples) {
        for (std::size_t c = 0; c < 3; ++c) m.stddev[c] += (s[c] - m.mean[c]) * (s[c] - m.mean[c]);
    }
    for (std::size_t c = 0; c < 3; ++c) m.stddev[c] = std::sqrt(m.stddev[c] / n);
    return m;
}

void check_config(const AugmentConfig& c) {
    if (!(c.scale_min > 0.0) || !(c.scale_max >= c.scale_min) || c.max_retries < 1 || c.ring_width < 1 ||
        !(c.matte_sigma > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "augmentation constants out of range");
    }
}

}  // namespace

ScaledPatch scale_patch(const PatchRecord& patch, double scale) {
    if (patch.image.empty() || patch.image.width() != patch.fg_mask.width() ||
        patch.image.height() != patch.fg_mask.height()) {
        throw Error(ErrorCode::InvalidArgument, "patch " + patch.patch_id + ": image and mask sizes differ");
    }
    if (!(scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale must be positive");
    const int pw = patch.image.width(), ph = patch.image.height();
    const int sw = std::max(1, static_cast<int>(std::lround(pw * scale)));
    const int sh = std::max(1, static_cast<int>(std::lround(ph * scale)));
    const double rx = static_cast<double>(pw) / sw, ry = static_cast<double>(ph) / sh;

    ScaledPatch out{Image(sw, sh), BinaryMask(sw, sh)};
    for (int y = 0; y < sh; ++y) {
        for (int x = 0; x < sw; ++x) {
            const double sx = std::clamp((x + 0.5) * rx - 0.5, 0.0, static_cast<double>(pw - 1));
            const double sy = std::clamp((y + 0.5) * ry - 0.5, 0.0, static_cast<double>(ph - 1));
            const auto v = sample_bilinear(patch.image, sx, sy);
            out.image.set(x, y, {to_byte(v[0]), to_byte(v[1]), to_byte(v[2])});

            const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
            const int x1 = std::min(x0 + 1, pw - 1), y1 = std::min(y0 + 1, ph - 1);
            const double fx = sx - x0, fy = sy - y0;
            const double coverage = (1 - fx) * (1 - fy) * patch.fg_mask.at(x0, y0) + fx * (1 - fy) * patch.fg_mask.at(x1, y0) +
                                    (1 - fx) * fy * patch.fg_mask.at(x0, y1) + fx * fy * patch.fg_mask.at(x1, y1);
            out.fg.set(x, y, coverage >= 0.5);
        }
    }
    if (out.fg.count() == 0) {
        throw Error(ErrorCode::InvalidArgument, "patch " + patch.patch_id + " has no foreground at this scale");
    }
    return out;
}

PatchOrigin patch_origin(const AugmentationPlan& plan, int scaled_width, int scaled_height) {
    return {plan.anchor_x - scaled_width / 2, plan.anchor_y - scaled_height / 2};
}

AugmentationPlan sample_placement(const PatchRecord& patch, const TargetFish& fish, std::uint64_t seed,
                                  const AugmentConfig& config) {
    check_config(config);
    const std::size_t patch_area = patch.fg_mask.count();
    const std::size_t fish_area = fish.mask.count();
    if (patch_area == 0) throw Error(ErrorCode::InvalidArgument, "patch " + patch.patch_id + " has an empty foreground");
    if (fish_area == 0) throw Error(ErrorCode::InvalidArgument, "fish " + fish.fish_id + " has an empty mask");
    if (static_cast<double>(patch_area) * config.scale_min * config.scale_min > static_cast<double>(fish_area)) {
        throw Error(ErrorCode::PlacementInfeasible,
                    "patch " + patch.patch_id + " is larger than fish " + fish.fish_id + " at the smallest scale");
    }

    Rng rng(seed);
    AugmentationPlan plan{patch.patch_id, fish.fish_id, 0, 0, config.scale_min, seed};
    plan.scale = rng.uniform(config.scale_min, config.scale_max);
    const ScaledPatch scaled = scale_patch(patch, plan.scale);

    std::vector<std::pair<int, int>> fg;
    int fx0 = scaled.fg.width(), fy0 = scaled.fg.height(), fx1 = -1, fy1 = -1;
    for (int y = 0; y < scaled.fg.height(); ++y) {
        for (int x = 0; x < scaled.fg.width(); ++x) {
            if (!scaled.fg.at(x, y)) continue;
            fg.emplace_back(x, y);
            fx0 = std::min(fx0, x);
            fx1 = std::max(fx1, x);
            fy0 = std::min(fy0, y);
            fy1 = std::max(fy1, y);
        }
    }
    const BoundingBox fish_box = bbox_from_mask(fish.mask);
    const int bx0 = static_cast<int>(std::lround(fish_box.x0() + 0.5));
    const int bx1 = static_cast<int>(std::lround(fish_box.x1() - 0.5));
    const int by0 = static_cast<int>(std::lround(fish_box.y0() + 0.5));
    const int by1 = static_cast<int>(std::lround(fish_box.y1() - 0.5));
    const int ox_lo = bx0 - fx0, ox_hi = bx1 - fx1;
    const int oy_lo = by0 - fy0, oy_hi = by1 - fy1;

    if (ox_lo <= ox_hi && oy_lo <= oy_hi) {
        for (int attempt = 0; attempt < config.max_retries; ++attempt) {
            const auto ox = static_cast<int>(rng.between(ox_lo, ox_hi));
            const auto oy = static_cast<int>(rng.between(oy_lo, oy_hi));
            const bool inside = std::all_of(fg.begin(), fg.end(), [&](const auto& p) {
                return fish.mask.at_or_false(ox + p.first, oy + p.second);
            });
            if (inside) {
                plan.anchor_x = ox + scaled.fg.width() / 2;
                plan.anchor_y = oy + scaled.fg.height() / 2;
                return plan;
            }
        }
    }
    throw Error(ErrorCode::PlacementInfeasible, "no placement of patch " + patch.patch_id + " inside fish " +
                                                    fish.fish_id + " after " + std::to_string(config.max_retries) +
                                                    " attempts");
}

BinaryMask harmonization_ring(const TargetFish& fish, const ScaledPatch& scaled, PatchOrigin origin, int ring_width) {
    std::vector<std::pair<int, int>> disc;
    for (int dy = -ring_width; dy <= ring_width; ++dy) {
        for (int dx = -ring_width; dx <= ring_width; ++dx) {
            if (dx * dx + dy * dy <= ring_width * ring_width) disc.emplace_back(dx, dy);
        }
    }
    const int w = fish.mask.width(), h = fish.mask.height();
    BinaryMask placed(w, h);
    for (int y = 0; y < scaled.fg.height(); ++y) {
        for (int x = 0; x < scaled.fg.width(); ++x) {
            if (scaled.fg.at(x, y) && placed.in_bounds(origin.x + x, origin.y + y)) placed.set(origin.x + x, origin.y + y);
        }
    }
    BinaryMask ring(w, h);
    for (int y = 0; y < scaled.fg.height(); ++y) {
        for (int x = 0; x < scaled.fg.width(); ++x) {
            if (!scaled.fg.at(x, y)) continue;
            // Only boundary pixels of the lesion can reach past its own area.
            const bool boundary = !scaled.fg.at_or_false(x - 1, y) || !scaled.fg.at_or_false(x + 1, y) ||
                                  !scaled.fg.at_or_false(x, y - 1) || !scaled.fg.at_or_false(x, y + 1);
            if (!boundary) continue;
            for (const auto& [dx, dy] : disc) {
                const int fx = origin.x + x + dx, fy = origin.y + y + dy;
                if (fish.mask.at_or_false(fx, fy) && !placed.at(fx, fy)) ring.set(fx, fy);
            }
        }
    }
    return ring;
}

Image harmonize_colors(const PatchRecord& patch, const TargetFish& fish, const AugmentationPlan& plan,
                       const AugmentConfig& config) {
    check_config(config);
    const ScaledPatch scaled = scale_patch(patch, plan.scale);
    const PatchOrigin origin = patch_origin(plan, scaled.image.width(), scaled.image.height());
    const BinaryMask ring = harmonization_ring(fish, scaled, origin, config.ring_width);
    const Decorrelation& d = decorrelation();

    std::vector<Vec3> ring_samples;
    for (int y = 0; y < ring.height(); ++y) {
        for (int x = 0; x < ring.width(); ++x) {
            if (ring.at(x, y)) ring_samples.push_back(multiply(d.forward, to_vec(fish.image.at(x, y))));
        }
    }
    if (ring_samples.empty()) {
        throw Error(ErrorCode::EmptyRing, "no fish pixels around the placement of " + plan.patch_id);
    }
    std::vector<Vec3> patch_samples;
    for (int y = 0; y < scaled.fg.height(); ++y) {
        for (int x = 0; x < scaled.fg.width(); ++x) {
            if (scaled.fg.at(x, y)) patch_samples.push_back(multiply(d.forward, to_vec(scaled.image.at(x, y))));
        }
    }
    const Moments target = moments(ring_samples);
    const Moments source = moments(patch_samples);
    Vec3 gain{};
    for (std::size_t c = 0; c < 3; ++c) gain[c] = source.stddev[c] > 1e-9 ? target.stddev[c] / source.stddev[c] : 1.0;

    Image out(scaled.image.width(), scaled.image.height());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            Vec3 v = multiply(d.forward, to_vec(scaled.image.at(x, y)));
            for (std::size_t c = 0; c < 3; ++c) v[c] = (v[c] - source.mean[c]) * gain[c] + target.mean[c];
            const Vec3 rgb = multiply(d.backward, v);
            out.set(x, y, {to_byte(rgb[0]), to_byte(rgb[1]), to_byte(rgb[2])});
        }
    }
    return out;
}

Matte blur_boundary(const BinaryMask& fg_mask, double sigma) {
    Matte m{fg_mask.width(), fg_mask.height(), {}};
    std::vector<double> field(fg_mask.data().begin(), fg_mask.data().end());
    m.alpha = convolve_separable(field, m.width, m.height, gaussian_kernel_1d(sigma, 2));
    for (double& a : m.alpha) a = std::clamp(a, 0.0, 1.0);
    return m;
}

AugmentedSample composite(const TargetFish& fish, const Image& adjusted_patch, const Matte& matte,
                          const AugmentationPlan& plan) {
    if (adjusted_patch.width() != matte.width || adjusted_patch.height() != matte.height) {
        throw Error(ErrorCode::InvalidArgument, "patch and matte sizes differ");
    }
    const PatchOrigin origin = patch_origin(plan, matte.width, matte.height);
    AugmentedSample sample;
    sample.image = fish.image;
    sample.provenance = plan;
    int gx0 = fish.image.width(), gy0 = fish.image.height(), gx1 = -1, gy1 = -1;
    for (int y = 0; y < matte.height; ++y) {
        for (int x = 0; x < matte.width; ++x) {
            const int fx = origin.x + x, fy = origin.y + y;
            if (!fish.image.in_bounds(fx, fy)) continue;
            const double a = matte.at(x, y);
            if (a > 0.5) {
                gx0 = std::min(gx0, fx);
                gx1 = std::max(gx1, fx);
                gy0 = std::min(gy0, fy);
                gy1 = std::max(gy1, fy);
            }
            if (a <= 0.0) continue;
            const Rgb p = adjusted_patch.at(x, y);
            const Rgb f = fish.image.at(fx, fy);
            Rgb out{};
            for (std::size_t c = 0; c < 3; ++c) out[c] = to_byte(a * p[c] + (1.0 - a) * f[c]);
            sample.image.set(fx, fy, out);
        }
    }
    if (gx1 < 0) throw Error(ErrorCode::GeometryError, "placed lesion falls outside the fish image");
    sample.gt_box = BoundingBox::from_edges(gx0 - 0.5, gy0 - 0.5, gx1 + 0.5, gy1 + 0.5);

    sample.part_class = "disease";
    if (fish.parts) {
        if (fish.parts->width() != fish.image.width() || fish.parts->height() != fish.image.height()) {
            throw Error(ErrorCode::InvalidArgument, "part label map of " + fish.fish_id + " does not match its image");
        }
        try {
            sample.part_class = to_string(assign_box_to_part(sample.gt_box, *fish.parts));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoOverlap) throw;
        }
    }
    return sample;
}

AugmentedSample apply_plan(const PatchRecord& patch, const TargetFish& fish, const AugmentationPlan& plan,
                           const AugmentConfig& config) {
    if (plan.patch_id != patch.patch_id || plan.fish_id != fish.fish_id) {
        throw Error(ErrorCode::InvalidArgument, "plan does not refer to the given patch and fish");
    }
    if (fish.image.width() != fish.mask.width() || fish.image.height() != fish.mask.height()) {
        throw Error(ErrorCode::InvalidArgument, "fish " + fish.fish_id + ": image and mask sizes differ");
    }
    const Image adjusted = harmonize_colors(patch, fish, plan, config);
    const ScaledPatch scaled = scale_patch(patch, plan.scale);
    return composite(fish, adjusted, blur_boundary(scaled.fg, config.matte_sigma), plan);
}

std::uint64_t combination_count(std::uint64_t n_patches, std::uint64_t n_fish, std::uint64_t n_size_variants) {
    if (n_patches == 0 || n_fish == 0 || n_size_variants == 0) return 0;
    std::uint64_t partial = 0, total = 0;
    if (__builtin_mul_overflow(n_patches, n_fish, &partial) || __builtin_mul_overflow(partial, n_size_variants, &total)) {
        throw Error(ErrorCode::Overflow, "combination count exceeds 64 bits");
    }
    return total;
}

}  // namespace fishpart
