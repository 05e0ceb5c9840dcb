#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. Words are handled as sequences of Unicode code points;
// every "character" in this library is one code point.
namespace polyseg::text {

// Throws DataError on malformed UTF-8.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);
std::string encode(char32_t codepoint);

// Each element is the UTF-8 encoding of one code point.
std::vector<std::string> split_chars(std::string_view word);
std::size_t char_length(std::string_view word);

// Matches the set Python's str.split() treats as whitespace.
bool is_space(char32_t c) noexcept;

// Splits on runs of Unicode whitespace, dropping empty fields.
std::vector<std::string> split_whitespace(std::string_view line);
bool contains_space(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace polyseg::text
