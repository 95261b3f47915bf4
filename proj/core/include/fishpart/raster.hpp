#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fishpart {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }
double distance(Point2 a, Point2 b);

/// Row-major foreground/background raster. Pixel (x, y) has its center at
/// the integer coordinate (x, y) and covers [x-0.5, x+0.5] x [y-0.5, y+0.5].
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }
    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    bool at(int x, int y) const { return data_[index(x, y)] != 0; }
    bool at_or_false(int x, int y) const { return in_bounds(x, y) && at(x, y); }
    void set(int x, int y, bool value = true) { data_[index(x, y)] = value ? 1 : 0; }

    std::size_t count() const;
    std::span<const std::uint8_t> data() const noexcept { return data_; }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

using Rgb = std::array<std::uint8_t, 3>;

/// Interleaved 8-bit RGB raster.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {0, 0, 0});

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }
    bool in_bounds(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    Rgb at(int x, int y) const {
        const std::size_t i = index(x, y);
        return {data_[i], data_[i + 1], data_[i + 2]};
    }
    std::uint8_t channel(int x, int y, int c) const { return data_[index(x, y) + static_cast<std::size_t>(c)]; }
    void set(int x, int y, Rgb v) {
        const std::size_t i = index(x, y);
        data_[i] = v[0];
        data_[i + 1] = v[1];
        data_[i + 2] = v[2];
    }

    std::span<const std::uint8_t> data() const noexcept { return data_; }
    std::span<std::uint8_t> data() noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

BinaryMask flip_horizontal(const BinaryMask& mask);
Image flip_horizontal(const Image& image);

/// Bilinear sample with coordinates clamped to the raster; channel values
/// are returned unrounded.
std::array<double, 3> sample_bilinear(const Image& image, double x, double y);

}  // namespace fishpart
