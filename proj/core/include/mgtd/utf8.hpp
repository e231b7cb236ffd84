#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mgtd::utf8 {

// Decodes UTF-8 into code points. Invalid bytes are mapped to lone surrogates
// U+DC80..U+DCFF (the surrogate-escape convention), so decode/encode is a
// lossless round trip for arbitrary byte strings.
std::u32string decode(std::string_view bytes);

// Inverse of decode(): encodes code points as UTF-8, mapping escaped
// surrogates back to their original bytes.
std::string encode(std::u32string_view chars);

std::string encode_char(char32_t c);

// Number of code points in a UTF-8 string.
std::size_t length(std::string_view bytes);

// Unicode whitespace (the White_Space property's common members).
bool is_space(char32_t c);

// Han ideographs plus kana and hangul: scripts written without word spaces.
bool is_cjk(char32_t c);

// Combining marks that should stay attached to the preceding character.
bool is_combining(char32_t c);

}  // namespace mgtd::utf8
