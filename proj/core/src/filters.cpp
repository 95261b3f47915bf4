#include "fishpart/filters.hpp"

#include <cmath>

#include "fishpart/error.hpp"

namespace fishpart {

std::vector<double> gaussian_kernel_1d(double sigma, int radius) {
    if (!(sigma > 0.0) || radius < 0) {
        throw Error(ErrorCode::InvalidArgument, "gaussian kernel needs sigma > 0 and radius >= 0");
    }
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double w = std::exp(-static_cast<double>(k * k) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(k + radius)] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

std::array<double, 25> gaussian_kernel_5x5(double sigma) {
    const auto taps = gaussian_kernel_1d(sigma, 2);
    std::array<double, 25> kernel{};
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 5; ++c) kernel[r * 5 + c] = taps[r] * taps[c];
    }
    return kernel;
}

std::vector<double> convolve_separable(const std::vector<double>& field, int width, int height,
                                       const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size() / 2);
    const auto w = static_cast<std::size_t>(width);
    std::vector<double> tmp(field.size(), 0.0);
    std::vector<double> out(field.size(), 0.0);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sx = x + k;
                if (sx < 0 || sx >= width) continue;
                acc += taps[static_cast<std::size_t>(k + radius)] * field[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(sx)];
            }
            tmp[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] = acc;
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                const int sy = y + k;
                if (sy < 0 || sy >= height) continue;
                acc += taps[static_cast<std::size_t>(k + radius)] * tmp[static_cast<std::size_t>(sy) * w + static_cast<std::size_t>(x)];
            }
            out[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] = acc;
        }
    }
    return out;
}

}  // namespace fishpart
