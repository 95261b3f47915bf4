#include "fishpart/image_io.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "fishpart/error.hpp"

namespace fishpart {
namespace {

cv::Mat load(const std::filesystem::path& path, int flags) {
    cv::Mat mat = cv::imread(path.string(), flags);
    if (mat.empty()) throw Error(ErrorCode::Io, "cannot read image " + path.string());
    return mat;
}

void store(const std::filesystem::path& path, const cv::Mat& mat) {
    // Fixed PNG parameters keep encoder output byte-stable between runs.
    const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), mat, params);
    } catch (const cv::Exception& e) {
        throw Error(ErrorCode::Io, "cannot write image " + path.string() + ": " + e.what());
    }
    if (!ok) throw Error(ErrorCode::Io, "cannot write image " + path.string());
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
    const cv::Mat bgr = load(path, cv::IMREAD_COLOR);
    Image out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) out.set(x, y, {row[x][2], row[x][1], row[x][0]});
    }
    return out;
}

void write_image(const std::filesystem::path& path, const Image& image) {
    cv::Mat bgr(image.height(), image.width(), CV_8UC3);
    for (int y = 0; y < image.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width(); ++x) {
            const Rgb v = image.at(x, y);
            row[x] = cv::Vec3b(v[2], v[1], v[0]);
        }
    }
    store(path, bgr);
}

BinaryMask read_mask(const std::filesystem::path& path) {
    const cv::Mat gray = load(path, cv::IMREAD_GRAYSCALE);
    BinaryMask out(gray.cols, gray.rows);
    for (int y = 0; y < gray.rows; ++y) {
        const auto* row = gray.ptr<std::uint8_t>(y);
        for (int x = 0; x < gray.cols; ++x) out.set(x, y, row[x] > 127);
    }
    return out;
}

void write_mask(const std::filesystem::path& path, const BinaryMask& mask) {
    cv::Mat gray(mask.height(), mask.width(), CV_8UC1);
    for (int y = 0; y < mask.height(); ++y) {
        auto* row = gray.ptr<std::uint8_t>(y);
        for (int x = 0; x < mask.width(); ++x) row[x] = mask.at(x, y) ? 255 : 0;
    }
    store(path, gray);
}

std::vector<std::uint8_t> read_gray(const std::filesystem::path& path, int& width, int& height) {
    const cv::Mat gray = load(path, cv::IMREAD_GRAYSCALE);
    width = gray.cols;
    height = gray.rows;
    std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
        const auto* row = gray.ptr<std::uint8_t>(y);
        std::copy(row, row + width, out.begin() + static_cast<std::ptrdiff_t>(y) * width);
    }
    return out;
}

void write_gray(const std::filesystem::path& path, int width, int height, const std::vector<std::uint8_t>& values) {
    if (values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorCode::InvalidArgument, "gray raster size mismatch for " + path.string());
    }
    cv::Mat gray(height, width, CV_8UC1);
    for (int y = 0; y < height; ++y) {
        std::copy(values.begin() + static_cast<std::ptrdiff_t>(y) * width,
                  values.begin() + static_cast<std::ptrdiff_t>(y + 1) * width, gray.ptr<std::uint8_t>(y));
    }
    store(path, gray);
}

bool is_image_file(const std::filesystem::path& path) {
    static constexpr std::array<std::string_view, 7> kExt{".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff", ".ppm"};
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return std::find(kExt.begin(), kExt.end(), ext) != kExt.end();
}

}  // namespace fishpart
