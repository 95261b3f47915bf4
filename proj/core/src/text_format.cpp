#include "fishpart/text_format.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "fishpart/error.hpp"

namespace fishpart {

std::string format_number(double value) {
    if (value == 0.0) return "0";  // folds -0 into 0
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), result.ptr);
}

std::string format_fixed(double value, int decimals) {
    std::array<char, 64> buf{};
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, decimals);
    std::string out(buf.data(), result.ptr);
    if (out.starts_with('-') && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
    return out;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        if (fields.empty() && line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        fields.emplace_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

double parse_number(std::string_view text, const std::string& context) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::Parse, context + ": not a number: '" + std::string(text) + "'");
    }
    return value;
}

long long parse_integer(std::string_view text, const std::string& context) {
    long long value = 0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc{} || result.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::Parse, context + ": not an integer: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace fishpart
