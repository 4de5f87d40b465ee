#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace koko {

std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Regular expressions use the ECMAScript grammar of std::regex everywhere
/// (character classes, alternation, quantifiers, anchors). Compiled patterns
/// are cached process-wide; throws std::regex_error on invalid patterns.
const std::regex& cached_regex(const std::string& pattern);

/// Whole-string match with the shared dialect.
bool regex_full_match(const std::string& pattern, const std::string& text);

/// Quotes with backslash escapes for `"` and `\`.
std::string quote(std::string_view s);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace koko
