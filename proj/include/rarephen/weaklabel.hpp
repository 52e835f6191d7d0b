#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "rarephen/nerl.hpp"

namespace rarephen {

struct WeakRuleParams {
  std::size_t l = 3;   // mention length must exceed l characters
  double p = 0.005;    // CUI share of all links must stay below p

  void validate() const;
  friend bool operator==(const WeakRuleParams&, const WeakRuleParams&) = default;
};

struct RuleEvaluation {
  bool lambda1 = false;  // length rule
  bool lambda2 = false;  // prevalence rule

  // XNOR selection, AND labelling.
  bool selected() const { return lambda1 == lambda2; }
  std::optional<bool> y_weak() const {
    if (!selected()) return std::nullopt;
    return lambda1 && lambda2;
  }
  friend bool operator==(const RuleEvaluation&, const RuleEvaluation&) = default;
};

// Per-CUI link counts over a candidate list L.
struct FrequencyTable {
  std::map<ConceptId, std::size_t> counts;
  std::size_t total = 0;

  static FrequencyTable over(const std::vector<MentionCandidate>& candidates);
  std::size_t count(const ConceptId& cui) const;
};

bool rule_length(const MentionCandidate& candidate, std::size_t l);

// freq / total < p, decided in exact integer arithmetic on the shortest
// decimal representation of p.
bool rule_prevalence(std::size_t freq, std::size_t total, double p);

RuleEvaluation evaluate_rules(const MentionCandidate& candidate, const FrequencyTable& freq,
                              const WeakRuleParams& params);

struct WeakLabeledPair {
  std::size_t index = 0;  // position in the input candidate list
  MentionCandidate candidate;
  RuleEvaluation rules;
};

struct WeakDataset {
  std::vector<WeakLabeledPair> labeled;
  std::vector<WeakLabeledPair> unlabeled;
  WeakRuleParams params;
  std::size_t total_links = 0;

  std::size_t positives() const;
  std::size_t negatives() const;
  // labeled and unlabeled merged back into input order
  std::vector<WeakLabeledPair> in_input_order() const;
};

WeakDataset weak_label(const std::vector<MentionCandidate>& candidates,
                       const WeakRuleParams& params);
// Variant taking the frequency table from a different list (e.g. the links
// before context filtering).
WeakDataset weak_label(const std::vector<MentionCandidate>& candidates,
                       const WeakRuleParams& params, const FrequencyTable& freq);

struct ParamGrid {
  std::vector<double> p;
  std::vector<std::size_t> l;

  static ParamGrid defaults();  // 7 values of p x {2, 3, 4}
};

struct GridCell {
  WeakRuleParams params;
  double score = 0.0;
};

struct GridResult {
  WeakRuleParams best;
  double best_score = 0.0;
  std::vector<GridCell> table;  // p-major, in grid order
};

using GridScorer = std::function<double(const WeakRuleParams&, const WeakDataset&)>;

// Exhaustive search; ties prefer smaller p, then smaller l. NaN scores never win.
GridResult grid_search(const std::vector<MentionCandidate>& candidates, const ParamGrid& grid,
                       const GridScorer& scorer);
GridResult grid_search(const std::vector<MentionCandidate>& candidates, const ParamGrid& grid,
                       const GridScorer& scorer, const FrequencyTable& freq);

}  // namespace rarephen
