#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "commands.hpp"
#include "fishpart/error.hpp"

namespace fishpart::cli {
namespace {

cv::Point2d to_cv(Point2 p) { return {p.x, p.y}; }

// Fixed-point drawing keeps sub-pixel ellipse centers.
constexpr int kShift = 4;
constexpr double kScale = 1 << kShift;

cv::Point fixed(Point2 p) {
    return {static_cast<int>(std::lround(p.x * kScale)), static_cast<int>(std::lround(p.y * kScale))};
}

void draw_ellipse(cv::Mat& canvas, const EllipseParams& e, const cv::Scalar& color) {
    const cv::Size axes(static_cast<int>(std::lround(e.semi_major * kScale)),
                        static_cast<int>(std::lround(e.semi_minor * kScale)));
    cv::ellipse(canvas, fixed(e.center), axes, e.axis_angle_deg, 0.0, 360.0, color, 1, cv::LINE_AA, kShift);
}

}  // namespace

void write_part_overlay(const std::filesystem::path& path, const Image& image, const PartSegmentation& seg) {
    cv::Mat canvas(image.height(), image.width(), CV_8UC3);
    // BGR tints: head red, fins green, body blue.
    const cv::Vec3d tint[4] = {{0, 0, 0}, {60, 60, 230}, {80, 200, 80}, {230, 120, 40}};
    for (int y = 0; y < image.height(); ++y) {
        for (int x = 0; x < image.width(); ++x) {
            const Rgb p = image.at(x, y);
            cv::Vec3d bgr(p[2], p[1], p[0]);
            const auto label = static_cast<int>(seg.labels.at(x, y));
            if (label != 0) bgr = 0.6 * bgr + 0.4 * tint[label];
            canvas.at<cv::Vec3b>(y, x) = cv::Vec3b(cv::saturate_cast<std::uint8_t>(bgr[0]),
                                                   cv::saturate_cast<std::uint8_t>(bgr[1]),
                                                   cv::saturate_cast<std::uint8_t>(bgr[2]));
        }
    }
    const PartRegions& r = seg.regions;
    draw_ellipse(canvas, r.head, {40, 40, 255});
    draw_ellipse(canvas, r.body, {255, 160, 40});
    draw_ellipse(canvas, r.fin_envelope, {60, 255, 60});
    cv::circle(canvas, fixed(r.tail_circle.center), static_cast<int>(std::lround(r.tail_circle.radius * kScale)),
               {0, 255, 255}, 1, cv::LINE_AA, kShift);
    for (Point2 p : {r.points.tail_up, r.points.tail_low, r.points.head_up, r.points.head_low, r.points.snout}) {
        cv::circle(canvas, fixed(p), 2 * static_cast<int>(kScale), {255, 255, 255}, cv::FILLED, cv::LINE_AA, kShift);
    }
    for (Point2 p : {r.points.tail_center, r.points.head_center}) {
        cv::drawMarker(canvas, to_cv(p), {0, 255, 255}, cv::MARKER_CROSS, 7);
    }
    if (!cv::imwrite(path.string(), canvas, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
        throw Error(ErrorCode::Io, "cannot write " + path.string());
    }
}

}  // namespace fishpart::cli
