#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fishpart {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

/// Fixed-point text with the given number of decimals, for reports.
std::string format_fixed(double value, int decimals);

/// Whitespace-separated fields of a line; empty for blank and `#` lines.
std::vector<std::string> split_fields(std::string_view line);

/// Strict numeric parsing; `context` prefixes the error message.
double parse_number(std::string_view text, const std::string& context);
long long parse_integer(std::string_view text, const std::string& context);

}  // namespace fishpart
