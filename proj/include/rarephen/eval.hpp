#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rarephen/ontology.hpp"
#include "rarephen/weaklabel.hpp"

namespace rarephen {

struct CandidateKey {
  std::string doc_id;
  std::size_t m_start = 0;
  std::size_t m_end = 0;
  ConceptId cui;

  static CandidateKey of(const MentionCandidate& c) { return {c.doc_id, c.m_start, c.m_end, c.cui}; }
  friend auto operator<=>(const CandidateKey&, const CandidateKey&) = default;
  friend bool operator==(const CandidateKey&, const CandidateKey&) = default;
};

struct GoldMentionLabel {
  CandidateKey key;
  bool label_umls = false;
  std::optional<ConceptId> ordo_id;
  std::optional<bool> label_ordo;
};

struct MetricsReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_total = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Zero denominators give 0 for precision, recall and F1.
MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                  std::size_t n_total);

// Binary confusion over the gold keys. A gold key absent from `predictions`
// counts as predicted negative.
MetricsReport mention_metrics(const std::map<CandidateKey, bool>& predictions,
                              const std::vector<GoldMentionLabel>& gold);

struct SeenUnseenSplit {
  std::set<CandidateKey> seen;
  std::set<CandidateKey> unseen;
  std::set<CandidateKey> unseen_lambda1;  // only the length rule holds
  std::set<CandidateKey> unseen_lambda2;  // only the prevalence rule holds
};

SeenUnseenSplit seen_unseen_split(const std::vector<CandidateKey>& keys,
                                  const std::map<CandidateKey, RuleEvaluation>& rules);

using AdmissionLabels = std::map<std::string, std::set<ConceptId>>;

// Each (admission, label) pair over the union of admissions and
// `label_universe` is one binary instance.
MetricsReport micro_admission_metrics(const AdmissionLabels& predicted,
                                      const AdmissionLabels& gold,
                                      const std::set<ConceptId>& label_universe);

// correct / total, or nullopt for an empty list.
std::optional<double> screening_accuracy(const std::vector<std::string>& flagged_cases,
                                         const std::vector<bool>& judgments);

// One row per evaluated mention.
struct MatchJudgment {
  ConceptId umls;
  ConceptId ordo;
  bool correct = false;
};

struct MatchingAccuracy {
  std::size_t unique_correct = 0;
  std::size_t unique_total = 0;
  std::size_t mention_correct = 0;
  std::size_t mention_total = 0;

  double unique_accuracy() const;
  double mention_accuracy() const;
};

// `keep` selects the pairs that survive a mapping filter (all by default),
// so the figures can be compared before and after filtering.
MatchingAccuracy matching_accuracy(
    const std::vector<MatchJudgment>& judgments,
    const std::function<bool(const MatchJudgment&)>& keep = nullptr);

}  // namespace rarephen
