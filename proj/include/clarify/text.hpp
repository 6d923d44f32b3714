#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clarify::text {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

/// Maximal runs of [a-z0-9] after ASCII lowercasing.
std::vector<std::string> tokenize(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);
bool istarts_with_word(std::string_view s, std::string_view word);

/// Text up to and including the first '.', '!' or '?' followed by whitespace or end.
std::string first_sentence(std::string_view s);

/// Case-insensitive replacement of every occurrence of `needle`.
std::string replace_all_icase(std::string_view s, std::string_view needle, std::string_view with);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace clarify::text
