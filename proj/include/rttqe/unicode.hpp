#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rttqe::unicode {

bool is_valid_utf8(std::string_view text);

/// NFC-normalizes UTF-8 text. Throws ValidationError on invalid UTF-8.
std::string nfc(std::string_view text);

/// Decodes UTF-8 into code points. Throws ValidationError on invalid UTF-8.
std::vector<char32_t> decode(std::string_view text);

std::string encode(char32_t code_point);
std::string encode(const std::vector<char32_t>& code_points);

/// Unicode White_Space property.
bool is_space(char32_t c);

/// Splits on runs of Unicode whitespace; never yields empty pieces.
std::vector<std::string> split_whitespace(std::string_view text);

/// Drops every whitespace code point.
std::vector<char32_t> strip_whitespace(std::string_view text);

}  // namespace rttqe::unicode
