#include "rarephen/text.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "rarephen/error.hpp"

namespace rarephen::text {

std::u32string decode_utf8(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw Error(ErrorKind::kParse,
                  "invalid UTF-8 sequence near byte " + std::to_string(i - 1));
    }
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) throw Error(ErrorKind::kParse, "scalar value cannot be encoded as UTF-8");
    out.append(reinterpret_cast<const char*>(buf), n);
  }
  return out;
}

char32_t fold(char32_t c) {
  return static_cast<char32_t>(u_foldCase(static_cast<UChar32>(c), U_FOLD_CASE_DEFAULT));
}

bool is_alnum(char32_t c) { return u_isalnum(static_cast<UChar32>(c)); }

bool is_space(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::u32string normalize(std::u32string_view text) {
  std::u32string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(fold(c));
  }
  return out;
}

std::string normalize_utf8(std::string_view utf8) {
  return encode_utf8(normalize(decode_utf8(utf8)));
}

std::string slice_utf8(std::u32string_view text, std::size_t start, std::size_t end) {
  return encode_utf8(text.substr(start, end - start));
}

std::vector<Token> tokenize(std::u32string_view text, bool special_markers) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char32_t c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (special_markers && c == U'[') {
      auto rest = text.substr(i);
      std::size_t len = 0;
      if (rest.starts_with(kSepMarker)) len = kSepMarker.size();
      if (rest.starts_with(kMaskMarker)) len = kMaskMarker.size();
      if (len > 0) {
        tokens.push_back({i, i + len, false, true});
        i += len;
        continue;
      }
    }
    if (is_alnum(c)) {
      std::size_t j = i + 1;
      while (j < n && is_alnum(text[j])) ++j;
      tokens.push_back({i, j, true, false});
      i = j;
      continue;
    }
    tokens.push_back({i, i + 1, false, false});
    ++i;
  }
  return tokens;
}

}  // namespace rarephen::text
