#pragma once

// Unicode helpers. All offsets used by the library are indices into a
// sequence of Unicode scalar values, never byte offsets.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rarephen::text {

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view text);

// Simple (length-preserving) case folding of one scalar value.
char32_t fold(char32_t c);
bool is_alnum(char32_t c);
bool is_space(char32_t c);

// Case-folds, maps every whitespace run to a single ' ', and trims.
std::u32string normalize(std::u32string_view text);
std::string normalize_utf8(std::string_view utf8);

std::string slice_utf8(std::u32string_view text, std::size_t start, std::size_t end);

struct Token {
  std::size_t start = 0;
  std::size_t end = 0;
  bool alnum = false;    // an alphanumeric run (counts toward window sizes)
  bool special = false;  // the literal "[SEP]" or "[MASK]"
};

// Splits on transitions between alphanumeric runs and everything else.
// Whitespace is dropped; every other non-alphanumeric scalar becomes its own
// token. With `special_markers`, the literals "[SEP]" and "[MASK]" are kept
// whole.
std::vector<Token> tokenize(std::u32string_view text, bool special_markers = false);

inline constexpr std::u32string_view kSepMarker = U"[SEP]";
inline constexpr std::u32string_view kMaskMarker = U"[MASK]";

}  // namespace rarephen::text
