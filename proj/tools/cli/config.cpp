#include "config.hpp"

#include <fstream>
#include <sstream>

#include "fishpart/error.hpp"
#include "fishpart/text_format.hpp"

namespace fishpart::cli {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw Error(ErrorCode::InvalidArgument, key + ": expected true or false, got '" + v + "'");
}

std::string bool_text(bool v) { return v ? "true" : "false"; }

template <typename T>
T parse_count(const std::string& key, const std::string& v) {
    const long long n = parse_integer(v, key);
    if (n < 0) throw Error(ErrorCode::InvalidArgument, key + " must not be negative");
    return static_cast<T>(n);
}

HeadHint parse_hint(const std::string& key, const std::string& v) {
    if (v == "auto") return HeadHint::Auto;
    if (v == "left") return HeadHint::Left;
    if (v == "right") return HeadHint::Right;
    throw Error(ErrorCode::InvalidArgument, key + ": expected auto, left or right");
}

HeadCanonical parse_canonical(const std::string& key, const std::string& v) {
    if (v == "keep") return HeadCanonical::Keep;
    if (v == "left") return HeadCanonical::Left;
    if (v == "right") return HeadCanonical::Right;
    throw Error(ErrorCode::InvalidArgument, key + ": expected keep, left or right");
}

std::string hint_text(HeadHint h) { return h == HeadHint::Auto ? "auto" : h == HeadHint::Left ? "left" : "right"; }
std::string canonical_text(HeadCanonical h) {
    return h == HeadCanonical::Keep ? "keep" : h == HeadCanonical::Left ? "left" : "right";
}

void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace

void PipelineConfig::apply(const Entries& entries) {
    for (const auto& [key, value] : entries) {
        if (key.rfind("paths.", 0) == 0 && key.size() > 6) paths[key.substr(6)] = value;
        else if (key == "align.margin") align.margin_fraction = parse_number(value, key);
        else if (key == "align.head") align.head = parse_hint(key, value);
        else if (key == "align.canonical") align.canonical = parse_canonical(key, value);
        else if (key == "partseg.profile") {
            if (value == "flatfish") profile = BodyProfile::Flatfish;
            else if (value == "fusiform") profile = BodyProfile::Fusiform;
            else throw Error(ErrorCode::InvalidArgument, key + ": expected flatfish or fusiform");
        } else if (key == "partseg.head_offset") partseg.head_offset = parse_number(value, key);
        else if (key == "partseg.tail_circle") partseg.tail_circle = parse_number(value, key);
        else if (key == "partseg.search_window") partseg.search_window = parse_number(value, key);
        else if (key == "augment.scale_min") augment.scale_min = parse_number(value, key);
        else if (key == "augment.scale_max") augment.scale_max = parse_number(value, key);
        else if (key == "augment.retries") augment.max_retries = parse_count<int>(key, value);
        else if (key == "augment.ring_width") augment.ring_width = parse_count<int>(key, value);
        else if (key == "augment.count") augment_count = parse_count<std::size_t>(key, value);
        else if (key == "eval.iou_threshold") iou_threshold = parse_number(value, key);
        else if (key == "eval.folds") folds = parse_count<int>(key, value);
        else if (key == "heatmap.width") canonical.width = parse_count<int>(key, value);
        else if (key == "heatmap.height") canonical.height = parse_count<int>(key, value);
        else if (key == "heatmap.smooth") heatmap.smooth = parse_bool(key, value);
        else if (key == "heatmap.sigma") heatmap.sigma = parse_number(value, key);
        else if (key == "seed") {
            if (value.empty() || value == "none") seed.reset();
            else seed = parse_count<std::uint64_t>(key, value);
        } else if (key == "jobs") jobs = parse_count<int>(key, value);
        else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
}

void PipelineConfig::validate() const {
    require(align.margin_fraction >= 0.0 && align.margin_fraction <= 0.5, "align.margin must lie in [0, 0.5]");
    require(partseg.head_offset > 0.0 && partseg.head_offset <= 5.0, "partseg.head_offset must lie in (0, 5]");
    require(partseg.tail_circle > 0.0 && partseg.tail_circle <= 5.0, "partseg.tail_circle must lie in (0, 5]");
    require(partseg.search_window > 0.0 && partseg.search_window <= 1.0, "partseg.search_window must lie in (0, 1]");
    require(augment.scale_min > 0.0 && augment.scale_max >= augment.scale_min,
            "augment scale range must satisfy 0 < scale_min <= scale_max");
    require(augment.max_retries >= 1, "augment.retries must be at least 1");
    require(augment.ring_width >= 1, "augment.ring_width must be at least 1");
    require(iou_threshold > 0.0 && iou_threshold < 1.0, "eval.iou_threshold must lie in (0, 1)");
    require(folds >= 2, "eval.folds must be at least 2");
    require(canonical.width > 0 && canonical.height > 0, "heatmap frame must be non-empty");
    require(heatmap.sigma > 0.0, "heatmap.sigma must be positive");
    require(jobs >= 1 && jobs <= 256, "jobs must lie in [1, 256]");
}

std::string PipelineConfig::to_text() const {
    std::ostringstream out;
    for (const auto& [name, p] : paths) out << "paths." << name << " = " << p.string() << '\n';
    out << "align.margin = " << format_number(align.margin_fraction) << '\n'
        << "align.head = " << hint_text(align.head) << '\n'
        << "align.canonical = " << canonical_text(align.canonical) << '\n'
        << "partseg.profile = " << to_string(profile) << '\n'
        << "partseg.head_offset = " << format_number(partseg.head_offset) << '\n'
        << "partseg.tail_circle = " << format_number(partseg.tail_circle) << '\n'
        << "partseg.search_window = " << format_number(partseg.search_window) << '\n'
        << "augment.scale_min = " << format_number(augment.scale_min) << '\n'
        << "augment.scale_max = " << format_number(augment.scale_max) << '\n'
        << "augment.retries = " << augment.max_retries << '\n'
        << "augment.ring_width = " << augment.ring_width << '\n'
        << "augment.count = " << augment_count << '\n'
        << "eval.iou_threshold = " << format_number(iou_threshold) << '\n'
        << "eval.folds = " << folds << '\n'
        << "heatmap.width = " << canonical.width << '\n'
        << "heatmap.height = " << canonical.height << '\n'
        << "heatmap.smooth = " << bool_text(heatmap.smooth) << '\n'
        << "heatmap.sigma = " << format_number(heatmap.sigma) << '\n'
        << "seed = " << (seed ? std::to_string(*seed) : std::string("none")) << '\n'
        << "jobs = " << jobs << '\n';
    return out.str();
}

PipelineConfig::Entries PipelineConfig::parse_text(const std::string& text, const std::string& source) {
    Entries out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line.substr(0, line.find('#')));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        const std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, where + ": expected `key = value`");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw Error(ErrorCode::InvalidArgument, where + ": empty key");
        out[key] = trim(t.substr(eq + 1));
    }
    return out;
}

PipelineConfig::Entries PipelineConfig::read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_text(text.str(), path.string());
}

std::filesystem::path PipelineConfig::path(const std::string& name) const {
    const auto it = paths.find(name);
    if (it == paths.end() || it->second.empty()) {
        throw Error(ErrorCode::InvalidArgument, "missing path '" + name + "' (flag or paths." + name + ")");
    }
    return it->second;
}

std::uint64_t PipelineConfig::require_seed(const std::string& command) const {
    if (!seed) throw Error(ErrorCode::InvalidArgument, command + " needs an explicit --seed");
    return *seed;
}

bool operator==(const PipelineConfig& a, const PipelineConfig& b) { return a.to_text() == b.to_text(); }

}  // namespace fishpart::cli
