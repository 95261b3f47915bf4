#include <fstream>

#include <json.hpp>

#include "fishpart/augmentation.hpp"
#include "fishpart/error.hpp"

namespace fishpart {

using ordered_json = nlohmann::ordered_json;

std::string to_manifest_line(const ManifestRecord& r) {
    ordered_json j;
    j["sample_id"] = r.sample_id;
    j["image"] = r.image_path;
    j["patch_id"] = r.plan.patch_id;
    j["fish_id"] = r.plan.fish_id;
    j["anchor"] = {r.plan.anchor_x, r.plan.anchor_y};
    j["scale"] = r.plan.scale;
    j["seed"] = r.plan.seed;
    j["gt_box"] = {r.gt_box.cx, r.gt_box.cy, r.gt_box.w, r.gt_box.h};
    j["part_class"] = r.part_class;
    return j.dump();
}

ManifestRecord parse_manifest_line(const std::string& line, const std::string& context) {
    try {
        const ordered_json j = ordered_json::parse(line);
        ManifestRecord r;
        r.sample_id = j.at("sample_id").get<std::string>();
        r.image_path = j.at("image").get<std::string>();
        r.plan.patch_id = j.at("patch_id").get<std::string>();
        r.plan.fish_id = j.at("fish_id").get<std::string>();
        const auto& anchor = j.at("anchor");
        if (anchor.size() != 2) throw Error(ErrorCode::Parse, context + ": anchor needs two coordinates");
        r.plan.anchor_x = anchor.at(0).get<int>();
        r.plan.anchor_y = anchor.at(1).get<int>();
        r.plan.scale = j.at("scale").get<double>();
        r.plan.seed = j.at("seed").get<std::uint64_t>();
        const auto& box = j.at("gt_box");
        if (box.size() != 4) throw Error(ErrorCode::Parse, context + ": gt_box needs four values");
        r.gt_box = {box.at(0).get<double>(), box.at(1).get<double>(), box.at(2).get<double>(), box.at(3).get<double>()};
        r.part_class = j.at("part_class").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, context + ": " + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open manifest " + path.string() + " for writing");
    for (const ManifestRecord& r : records) out << to_manifest_line(r) << '\n';
    if (!out) throw Error(ErrorCode::Io, "failed writing manifest " + path.string());
}

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open manifest " + path.string());
    std::vector<ManifestRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        records.push_back(parse_manifest_line(line, path.string() + ":" + std::to_string(line_no)));
    }
    return records;
}

}  // namespace fishpart
