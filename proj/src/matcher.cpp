#include "rarephen/matcher.hpp"

#include <algorithm>
#include <queue>

#include "rarephen/error.hpp"
#include "rarephen/text.hpp"

namespace rarephen {

Matcher::Matcher(const std::vector<std::string>& patterns) {
  patterns_.reserve(patterns.size());
  nodes_.emplace_back();
  for (std::size_t id = 0; id < patterns.size(); ++id) {
    std::u32string p = text::normalize(text::decode_utf8(patterns[id]));
    if (p.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "pattern " + std::to_string(id) +
                                                   " is empty after normalization");
    }
    int v = 0;
    for (char32_t c : p) {
      auto it = nodes_[v].next.find(c);
      if (it == nodes_[v].next.end()) {
        const int fresh = static_cast<int>(nodes_.size());
        nodes_[v].next.emplace(c, fresh);
        nodes_.emplace_back();
        v = fresh;
      } else {
        v = it->second;
      }
    }
    nodes_[v].outputs.push_back(id);
    patterns_.push_back(std::move(p));
  }

  std::queue<int> queue;
  for (const auto& [c, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    queue.push(child);
  }
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (const auto& [c, child] : nodes_[v].next) {
      int f = nodes_[v].fail;
      while (f != 0 && !nodes_[f].next.contains(c)) f = nodes_[f].fail;
      auto it = nodes_[f].next.find(c);
      nodes_[child].fail = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
      const int fail = nodes_[child].fail;
      nodes_[child].dict = nodes_[fail].outputs.empty() ? nodes_[fail].dict : fail;
      queue.push(child);
    }
  }
}

int Matcher::step(int state, char32_t c) const {
  while (true) {
    auto it = nodes_[state].next.find(c);
    if (it != nodes_[state].next.end()) return it->second;
    if (state == 0) return 0;
    state = nodes_[state].fail;
  }
}

std::vector<Match> Matcher::find_all(std::u32string_view text) const {
  std::vector<Match> out;
  if (patterns_.empty()) return out;

  // Folded text with whitespace runs collapsed; origin[k] is the text index
  // of folded scalar k.
  std::u32string folded;
  std::vector<std::size_t> origin;
  folded.reserve(text.size());
  origin.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text::is_space(text[i])) {
      if (!folded.empty() && folded.back() == U' ') continue;
      folded.push_back(U' ');
    } else {
      folded.push_back(text::fold(text[i]));
    }
    origin.push_back(i);
  }

  auto inside_run = [&](std::size_t boundary) {
    return boundary > 0 && boundary < text.size() && text::is_alnum(text[boundary - 1]) &&
           text::is_alnum(text[boundary]);
  };

  int state = 0;
  for (std::size_t k = 0; k < folded.size(); ++k) {
    state = step(state, folded[k]);
    for (int v = nodes_[state].outputs.empty() ? nodes_[state].dict : state; v > 0;
         v = nodes_[v].dict) {
      for (std::size_t id : nodes_[v].outputs) {
        const std::size_t folded_start = k + 1 - patterns_[id].size();
        const std::size_t start = origin[folded_start];
        const std::size_t end = origin[k] + 1;
        if (inside_run(start) || inside_run(end)) continue;
        out.push_back({start, end, id});
      }
    }
  }
  return out;
}

std::vector<Match> Matcher::find(std::u32string_view text) const {
  return leftmost_longest(find_all(text));
}

std::vector<Match> Matcher::find_utf8(std::string_view text) const {
  return find(text::decode_utf8(text));
}

std::vector<Match> leftmost_longest(std::vector<Match> matches) {
  std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
    if (a.start != b.start) return a.start < b.start;
    if (a.end != b.end) return a.end > b.end;
    return a.pattern < b.pattern;
  });
  std::vector<Match> kept;
  std::size_t covered = 0;
  for (const Match& m : matches) {
    if (!kept.empty() && m.start < covered) continue;
    kept.push_back(m);
    covered = m.end;
  }
  return kept;
}

}  // namespace rarephen
