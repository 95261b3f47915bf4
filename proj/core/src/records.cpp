#include <fstream>
#include <istream>
#include <ostream>

#include "fishpart/error.hpp"
#include "fishpart/evaluation.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart {
namespace {

BoundingBox parse_box(const std::vector<std::string>& f, const std::string& where) {
    const BoundingBox box{parse_number(f[2], where), parse_number(f[3], where), parse_number(f[4], where),
                          parse_number(f[5], where)};
    if (!(box.w > 0.0) || !(box.h > 0.0)) throw Error(ErrorCode::Parse, where + ": box must have positive size");
    return box;
}

std::ifstream open_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

}  // namespace

std::vector<DetectionRecord> parse_detections(std::istream& in, const std::string& source) {
    std::vector<DetectionRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != 7) throw Error(ErrorCode::Parse, where + ": expected `image_id class cx cy w h confidence`");
        DetectionRecord r{f[0], f[1], parse_box(f, where), parse_number(f[6], where)};
        if (r.confidence < 0.0 || r.confidence > 1.0) throw Error(ErrorCode::Parse, where + ": confidence outside [0, 1]");
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in, const std::string& source) {
    std::vector<GroundTruthRecord> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        const std::string where = source + ":" + std::to_string(line_no);
        if (f.size() != 7 && f.size() != 8) {
            throw Error(ErrorCode::Parse, where + ": expected `image_id class cx cy w h identity_id [side]`");
        }
        GroundTruthRecord r{f[0], f[1], parse_box(f, where), f[6], "ocular"};
        if (f.size() == 8) {
            if (f[7] != "ocular" && f[7] != "blind") throw Error(ErrorCode::Parse, where + ": side must be ocular or blind");
            r.side = f[7];
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<DetectionRecord> read_detections(const std::filesystem::path& path) {
    auto in = open_records(path);
    return parse_detections(in, path.string());
}

std::vector<GroundTruthRecord> read_ground_truth(const std::filesystem::path& path) {
    auto in = open_records(path);
    return parse_ground_truth(in, path.string());
}

void write_detection(std::ostream& out, const DetectionRecord& r) {
    out << r.image_id << ' ' << r.cls << ' ' << format_number(r.box.cx) << ' ' << format_number(r.box.cy) << ' '
        << format_number(r.box.w) << ' ' << format_number(r.box.h) << ' ' << format_number(r.confidence) << '\n';
}

void write_ground_truth(std::ostream& out, const GroundTruthRecord& r) {
    out << r.image_id << ' ' << r.cls << ' ' << format_number(r.box.cx) << ' ' << format_number(r.box.cy) << ' '
        << format_number(r.box.w) << ' ' << format_number(r.box.h) << ' ' << r.identity_id << ' ' << r.side << '\n';
}

}  // namespace fishpart
