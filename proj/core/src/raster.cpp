#include "fishpart/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fishpart/error.hpp"

namespace fishpart {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoForeground: return "NoForeground";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::DegenerateShape: return "DegenerateShape";
        case ErrorCode::FragmentedMask: return "FragmentedMask";
        case ErrorCode::NoTailNotch: return "NoTailNotch";
        case ErrorCode::GeometryError: return "GeometryError";
        case ErrorCode::NoOverlap: return "NoOverlap";
        case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
        case ErrorCode::EmptyRing: return "EmptyRing";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::NoGroundTruth: return "NoGroundTruth";
        case ErrorCode::NoClasses: return "NoClasses";
        case ErrorCode::TooFewIdentities: return "TooFewIdentities";
        case ErrorCode::OutOfFrame: return "OutOfFrame";
        case ErrorCode::EmptyInput: return "EmptyInput";
    }
    return "Unknown";
}

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative mask size");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](std::uint8_t v) { return v != 0; }));
}

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error(ErrorCode::InvalidArgument, "negative image size");
    data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill[0];
        data_[i + 1] = fill[1];
        data_[i + 2] = fill[2];
    }
}

BinaryMask flip_horizontal(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) out.set(mask.width() - 1 - x, y, mask.at(x, y));
    }
    return out;
}

Image flip_horizontal(const Image& image) {
    Image out(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) out.set(image.width() - 1 - x, y, image.at(x, y));
    }
    return out;
}

std::array<double, 3> sample_bilinear(const Image& image, double x, double y) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(image.width() - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(image.height() - 1));
    const int x0 = static_cast<int>(std::floor(cx));
    const int y0 = static_cast<int>(std::floor(cy));
    const int x1 = std::min(x0 + 1, image.width() - 1);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - fx) * image.channel(x0, y0, c) + fx * image.channel(x1, y0, c);
        const double bottom = (1.0 - fx) * image.channel(x0, y1, c) + fx * image.channel(x1, y1, c);
        out[static_cast<std::size_t>(c)] = (1.0 - fy) * top + fy * bottom;
    }
    return out;
}

}  // namespace fishpart
