#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rarephen {

struct Match {
  std::size_t start = 0;  // scalar-value offsets into the scanned text
  std::size_t end = 0;
  std::size_t pattern = 0;

  friend bool operator==(const Match&, const Match&) = default;
};

// Aho-Corasick automaton over case-folded Unicode scalar values.
//
// Matching is case-insensitive and treats any whitespace run in the text as a
// single space. A match may not begin or end inside an alphanumeric run.
// Overlapping matches are resolved leftmost-longest; among identical spans
// the lowest pattern index wins.
class Matcher {
 public:
  Matcher() = default;
  explicit Matcher(const std::vector<std::string>& patterns);

  std::vector<Match> find(std::u32string_view text) const;
  std::vector<Match> find_utf8(std::string_view text) const;

  // Every boundary-respecting occurrence, before overlap resolution.
  std::vector<Match> find_all(std::u32string_view text) const;

  std::size_t size() const { return patterns_.size(); }
  const std::u32string& pattern(std::size_t i) const { return patterns_[i]; }
  bool empty() const { return patterns_.empty(); }

 private:
  struct Node {
    std::map<char32_t, int> next;
    int fail = 0;
    int dict = -1;  // nearest node on the fail chain that ends a pattern
    std::vector<std::size_t> outputs;
  };

  int step(int state, char32_t c) const;

  std::vector<std::u32string> patterns_;
  std::vector<Node> nodes_;
};

// Keeps the leftmost-longest non-overlapping subset of `matches`.
std::vector<Match> leftmost_longest(std::vector<Match> matches);

}  // namespace rarephen
