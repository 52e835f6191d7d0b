#include "rarephen/weaklabel.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "rarephen/error.hpp"

namespace rarephen {

namespace {

using u128 = unsigned __int128;

// p == numerator / 10^scale, from the shortest decimal that round-trips p.
struct DecimalFraction {
  std::uint64_t numerator = 0;
  int scale = 0;
};

DecimalFraction to_decimal(double p) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), p, std::chars_format::scientific);
  if (ec != std::errc()) throw Error(ErrorKind::kInvalidArgument, "cannot format p");
  const std::string_view s(buf, static_cast<std::size_t>(end - buf));
  const std::size_t e = s.find('e');
  std::uint64_t digits = 0;
  int fraction_digits = 0;
  bool after_point = false;
  for (char c : s.substr(0, e)) {
    if (c == '.') {
      after_point = true;
      continue;
    }
    digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
    if (after_point) ++fraction_digits;
  }
  int exponent = 0;
  std::from_chars(s.data() + e + 1 + (s[e + 1] == '+' ? 1 : 0), s.data() + s.size(), exponent);
  int scale = fraction_digits - exponent;
  while (scale < 0) {
    digits *= 10;
    ++scale;
  }
  return {digits, scale};
}

}  // namespace

void WeakRuleParams::validate() const {
  if (!(p > 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "prevalence threshold p must lie in (0, 1]");
  }
}

FrequencyTable FrequencyTable::over(const std::vector<MentionCandidate>& candidates) {
  FrequencyTable t;
  for (const auto& c : candidates) ++t.counts[c.cui];
  t.total = candidates.size();
  return t;
}

std::size_t FrequencyTable::count(const ConceptId& cui) const {
  auto it = counts.find(cui);
  return it == counts.end() ? 0 : it->second;
}

bool rule_length(const MentionCandidate& candidate, std::size_t l) {
  return candidate.m_end - candidate.m_start > l;
}

bool rule_prevalence(std::size_t freq, std::size_t total, double p) {
  if (total == 0) throw Error(ErrorKind::kInvalidArgument, "prevalence rule needs |L| > 0");
  if (freq > total) throw Error(ErrorKind::kInvalidArgument, "CUI frequency exceeds |L|");
  WeakRuleParams{0, p}.validate();
  if (freq == 0) return true;

  // freq / total < num / 10^scale  <=>  freq * 10^scale < num * total
  const DecimalFraction d = to_decimal(p);
  const u128 rhs = static_cast<u128>(d.numerator) * total;
  u128 lhs = freq;
  for (int i = 0; i < d.scale; ++i) {
    if (lhs > rhs) return false;  // lhs only grows
    lhs *= 10;
  }
  return lhs < rhs;
}

RuleEvaluation evaluate_rules(const MentionCandidate& candidate, const FrequencyTable& freq,
                              const WeakRuleParams& params) {
  return {rule_length(candidate, params.l),
          rule_prevalence(freq.count(candidate.cui), freq.total, params.p)};
}

std::size_t WeakDataset::positives() const {
  std::size_t n = 0;
  for (const auto& pair : labeled) n += pair.rules.y_weak().value_or(false) ? 1 : 0;
  return n;
}

std::size_t WeakDataset::negatives() const { return labeled.size() - positives(); }

std::vector<WeakLabeledPair> WeakDataset::in_input_order() const {
  std::vector<WeakLabeledPair> all;
  all.reserve(labeled.size() + unlabeled.size());
  auto a = labeled.begin();
  auto b = unlabeled.begin();
  while (a != labeled.end() || b != unlabeled.end()) {
    if (b == unlabeled.end() || (a != labeled.end() && a->index < b->index)) {
      all.push_back(*a++);
    } else {
      all.push_back(*b++);
    }
  }
  return all;
}

WeakDataset weak_label(const std::vector<MentionCandidate>& candidates,
                       const WeakRuleParams& params) {
  return weak_label(candidates, params, FrequencyTable::over(candidates));
}

WeakDataset weak_label(const std::vector<MentionCandidate>& candidates,
                       const WeakRuleParams& params, const FrequencyTable& freq) {
  params.validate();
  if (candidates.empty()) throw Error(ErrorKind::kEmptyInput, "no candidates to label");
  WeakDataset out;
  out.params = params;
  out.total_links = freq.total;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    WeakLabeledPair pair{i, candidates[i], evaluate_rules(candidates[i], freq, params)};
    (pair.rules.selected() ? out.labeled : out.unlabeled).push_back(std::move(pair));
  }
  return out;
}

ParamGrid ParamGrid::defaults() {
  return {{1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1}, {2, 3, 4}};
}

GridResult grid_search(const std::vector<MentionCandidate>& candidates, const ParamGrid& grid,
                       const GridScorer& scorer) {
  return grid_search(candidates, grid, scorer, FrequencyTable::over(candidates));
}

GridResult grid_search(const std::vector<MentionCandidate>& candidates, const ParamGrid& grid,
                       const GridScorer& scorer, const FrequencyTable& freq) {
  if (grid.p.empty() || grid.l.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "parameter grid is empty");
  }
  GridResult result;
  bool have_best = false;
  for (double p : grid.p) {
    for (std::size_t l : grid.l) {
      const WeakRuleParams params{l, p};
      const double score = scorer(params, weak_label(candidates, params, freq));
      result.table.push_back({params, score});
      if (std::isnan(score)) continue;
      const bool better =
          !have_best || score > result.best_score ||
          (score == result.best_score &&
           (p < result.best.p || (p == result.best.p && l < result.best.l)));
      if (better) {
        result.best = params;
        result.best_score = score;
        have_best = true;
      }
    }
  }
  if (!have_best) {
    result.best = result.table.front().params;
    result.best_score = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

}  // namespace rarephen
