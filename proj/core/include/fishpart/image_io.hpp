#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fishpart/raster.hpp"

namespace fishpart {

// Rasters are exchanged as ordinary image files. Masks are single-channel
// 8-bit (0 background, 255 foreground; anything above 127 reads as
// foreground). Color images are decoded to RGB regardless of file order.

Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& image);

BinaryMask read_mask(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

/// Single-channel 8-bit raster, returned row-major.
std::vector<std::uint8_t> read_gray(const std::filesystem::path& path, int& width, int& height);
void write_gray(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& values);

bool is_image_file(const std::filesystem::path& path);

}  // namespace fishpart
