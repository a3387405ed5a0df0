#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace joaicl::utf8 {

// Number of code points in a UTF-8 string. Bytes that do not form a valid
// sequence count as one code point each, so the functions below never throw.
std::size_t length(std::string_view s);

// Byte offset of the code point at index `cp` (cp == length(s) maps to
// s.size()). Indices past the end clamp to s.size().
std::size_t byte_offset(std::string_view s, std::size_t cp);

// Substring by code-point range [cp_start, cp_end).
std::string_view substr(std::string_view s, std::size_t cp_start, std::size_t cp_end);

// Decode the code point starting at byte `pos`; advances `pos` past it.
char32_t decode(std::string_view s, std::size_t& pos);

// Whitespace test covering ASCII space/tab/newlines plus NBSP and the
// ideographic space used in Korean text.
bool is_space(char32_t cp);

// Count of non-whitespace code points.
std::size_t non_space_count(std::string_view s);

// ASCII-only lowercase copy; multi-byte sequences pass through untouched.
std::string ascii_lower(std::string_view s);

} // namespace joaicl::utf8
