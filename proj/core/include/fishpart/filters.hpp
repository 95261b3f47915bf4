#pragma once

#include <array>
#include <vector>

namespace fishpart {

/// Normalized 1-D Gaussian taps exp(-k^2 / 2 sigma^2) for k in [-radius, radius].
std::vector<double> gaussian_kernel_1d(double sigma, int radius);

/// Normalized 5x5 Gaussian, row-major, as used for matte softening.
std::array<double, 25> gaussian_kernel_5x5(double sigma = 0.5);

/// Separable convolution of a row-major scalar field with zero padding
/// outside the raster.
std::vector<double> convolve_separable(const std::vector<double>& field, int width, int height,
                                       const std::vector<double>& taps);

}  // namespace fishpart
