#include "rarephen/eval.hpp"

#include "rarephen/error.hpp"

namespace rarephen {

MetricsReport metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                  std::size_t n_total) {
  MetricsReport m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.n_pos = tp + fn;
  m.n_total = n_total;
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0
             ? 0.0
             : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

MetricsReport mention_metrics(const std::map<CandidateKey, bool>& predictions,
                              const std::vector<GoldMentionLabel>& gold) {
  std::set<CandidateKey> seen;
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& g : gold) {
    if (!seen.insert(g.key).second) {
      throw Error(ErrorKind::kInvalidArgument, "duplicate gold key " + g.key.doc_id + ":" +
                                                   std::to_string(g.key.m_start) + "-" +
                                                   std::to_string(g.key.m_end) + ":" +
                                                   g.key.cui.code());
    }
    auto it = predictions.find(g.key);
    const bool predicted = it != predictions.end() && it->second;
    if (predicted && g.label_umls) ++tp;
    if (predicted && !g.label_umls) ++fp;
    if (!predicted && g.label_umls) ++fn;
  }
  return metrics_from_counts(tp, fp, fn, gold.size());
}

SeenUnseenSplit seen_unseen_split(const std::vector<CandidateKey>& keys,
                                  const std::map<CandidateKey, RuleEvaluation>& rules) {
  SeenUnseenSplit split;
  for (const auto& key : keys) {
    auto it = rules.find(key);
    if (it == rules.end()) {
      throw Error(ErrorKind::kInvalidArgument, "no rule evaluation for " + key.doc_id + ":" +
                                                   std::to_string(key.m_start) + "-" +
                                                   std::to_string(key.m_end));
    }
    const RuleEvaluation& r = it->second;
    if (r.selected()) {
      split.seen.insert(key);
      continue;
    }
    split.unseen.insert(key);
    (r.lambda1 ? split.unseen_lambda1 : split.unseen_lambda2).insert(key);
  }
  return split;
}

MetricsReport micro_admission_metrics(const AdmissionLabels& predicted, const AdmissionLabels& gold,
                                      const std::set<ConceptId>& label_universe) {
  std::set<std::string> admissions;
  auto check = [&](const AdmissionLabels& labels) {
    for (const auto& [admission, set] : labels) {
      admissions.insert(admission);
      for (const auto& label : set) {
        if (!label_universe.contains(label)) {
          throw Error(ErrorKind::kInvalidArgument,
                      "label " + label.code() + " is outside the label universe");
        }
      }
    }
  };
  check(predicted);
  check(gold);

  static const std::set<ConceptId> kNone;
  auto labels_of = [](const AdmissionLabels& labels, const std::string& a) -> const auto& {
    auto it = labels.find(a);
    return it == labels.end() ? kNone : it->second;
  };
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& a : admissions) {
    const auto& p = labels_of(predicted, a);
    const auto& g = labels_of(gold, a);
    for (const auto& label : p) (g.contains(label) ? tp : fp) += 1;
    for (const auto& label : g) fn += p.contains(label) ? 0 : 1;
  }
  return metrics_from_counts(tp, fp, fn, admissions.size() * label_universe.size());
}

std::optional<double> screening_accuracy(const std::vector<std::string>& flagged_cases,
                                         const std::vector<bool>& judgments) {
  if (flagged_cases.size() != judgments.size()) {
    throw Error(ErrorKind::kInvalidArgument, "flagged cases and judgments differ in length");
  }
  if (judgments.empty()) return std::nullopt;
  std::size_t correct = 0;
  for (bool j : judgments) correct += j ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(judgments.size());
}

double MatchingAccuracy::unique_accuracy() const {
  return unique_total == 0 ? 0.0
                           : static_cast<double>(unique_correct) / static_cast<double>(unique_total);
}

double MatchingAccuracy::mention_accuracy() const {
  return mention_total == 0
             ? 0.0
             : static_cast<double>(mention_correct) / static_cast<double>(mention_total);
}

MatchingAccuracy matching_accuracy(const std::vector<MatchJudgment>& judgments,
                                   const std::function<bool(const MatchJudgment&)>& keep) {
  MatchingAccuracy acc;
  std::map<std::pair<ConceptId, ConceptId>, bool> unique;
  for (const auto& j : judgments) {
    if (keep && !keep(j)) continue;
    auto [it, inserted] = unique.emplace(std::make_pair(j.umls, j.ordo), j.correct);
    if (!inserted && it->second != j.correct) {
      throw Error(ErrorKind::kInvalidArgument, "conflicting judgments for " + j.umls.code() +
                                                   " -> " + j.ordo.code());
    }
    ++acc.mention_total;
    acc.mention_correct += j.correct ? 1 : 0;
  }
  acc.unique_total = unique.size();
  for (const auto& [pair, correct] : unique) acc.unique_correct += correct ? 1 : 0;
  return acc;
}

}  // namespace rarephen
