// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "rarephen/eval.hpp"
#include "rarephen/io.hpp"
#include "rarephen/matcher.hpp"
#include "rarephen/model.hpp"
#include "rarephen/pipeline.hpp"
#include "rarephen/weaklabel.hpp"
#include "synthetic.hpp"

using namespace rarephen;
using namespace rarephen::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

double pct(double x) { return x * 100.0; }

bool near_pct(double value, double expected) { return std::abs(pct(value) - expected) <= 0.05; }

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Outcome metric_arithmetic() {
  auto all_positive = [](std::size_t pos, std::size_t n) {
    std::vector<GoldMentionLabel> gold;
    std::map<CandidateKey, bool> pred;
    for (std::size_t i = 0; i < n; ++i) {
      CandidateKey k{"doc" + std::to_string(i), 0, 5, ConceptId::umls("C0000001")};
      gold.push_back({k, i < pos, std::nullopt, std::nullopt});
      pred[k] = true;
    }
    return mention_metrics(pred, gold);
  };
  const auto test = all_positive(187, 673);
  const auto val = all_positive(142, 400);
  Outcome o;
  o.ok = near_pct(test.precision, 27.8) && near_pct(test.recall, 100.0) && near_pct(test.f1, 43.5) &&
         near_pct(val.precision, 35.5) && near_pct(val.f1, 52.4);
  o.detail = fmt("187/673 -> P=%.2f R=%.2f F1=%.2f; 142/400 -> P=%.2f F1=%.2f", pct(test.precision),
                 pct(test.recall), pct(test.f1), pct(val.precision), pct(val.f1));
  return o;
}

Outcome weak_partition() {
  Gen gen(1000);
  std::vector<MentionCandidate> l;
  for (std::size_t i = 0; i < 1000; ++i) {
    MentionCandidate c;
    c.doc_id = "doc" + std::to_string(i / 10);
    const std::size_t len = gen.size(1, 12);
    c.m_start = (i % 10) * 20;
    c.m_end = c.m_start + len;
    c.surface = std::string(len, 'a');
    c.cui = ConceptId::umls(cui_code(gen.chance(0.3) ? gen.size(0, 3) : gen.size(10, 400)));
    c.context = c.surface;
    c.window = {c.m_start, c.m_end};
    c.mention_in_context = {0, len};
    l.push_back(c);
  }
  const WeakRuleParams params{3, 0.005};
  const WeakDataset w = weak_label(l, params);

  std::map<ConceptId, std::size_t> freq;
  for (const auto& c : l) ++freq[c.cui];
  std::size_t violations = 0;
  std::vector<int> seen(l.size(), 0);
  auto brute = [&](const MentionCandidate& c) {
    const bool l1 = c.surface.size() > params.l;
    const bool l2 = static_cast<double>(freq[c.cui]) / static_cast<double>(l.size()) < params.p;
    return std::make_pair(l1, l2);
  };
  for (const auto& pair : w.labeled) {
    ++seen.at(pair.index);
    if (!(pair.candidate == l[pair.index])) ++violations;
    const auto [l1, l2] = brute(pair.candidate);
    const bool y = *pair.rules.y_weak();
    if (y && !(l1 && l2)) ++violations;
    if (!y && (l1 || l2)) ++violations;
  }
  for (const auto& pair : w.unlabeled) {
    ++seen.at(pair.index);
    if (!(pair.candidate == l[pair.index])) ++violations;
    const auto [l1, l2] = brute(pair.candidate);
    if (l1 == l2) ++violations;
  }
  for (int s : seen) violations += s == 1 ? 0 : 1;
  Outcome o;
  o.ok = violations == 0;
  o.detail = fmt("%zu positive, %zu negative, %zu unlabeled, %zu violations", w.positives(),
                 w.negatives(), w.unlabeled.size(), violations);
  return o;
}

Outcome paper_counts() {
  constexpr std::size_t positives = 15598, negatives = 74217, unlabeled = 37335, total = 127150;
  Outcome o;
  o.ok = positives + negatives + unlabeled == total;
  o.detail = fmt("%zu + %zu + %zu = %zu", positives, negatives, unlabeled,
                 positives + negatives + unlabeled);
  return o;
}

Outcome matcher_oracle() {
  Gen gen(2024);
  std::size_t mismatches = 0, total_matches = 0;
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> patterns;
    for (std::size_t i = 0, n = gen.size(1, 10); i < n; ++i) {
      std::string p = gen.string_of("abcd", 1, 4);
      if (gen.chance(0.3)) p += " " + gen.string_of("abcd", 1, 3);
      patterns.push_back(p);
    }
    const std::string text = gen.string_of("abcdAB  \n\t.,-", 0, 200);
    std::vector<OracleMatch> got;
    for (const auto& m : Matcher(patterns).find_utf8(text)) got.push_back({m.start, m.end, m.pattern});
    const auto want = oracle_matches(text, patterns);
    total_matches += want.size();
    if (got != want) ++mismatches;
  }
  Outcome o;
  o.ok = mismatches == 0;
  o.detail = fmt("200 instances, %zu oracle matches, %zu mismatching instances", total_matches,
                 mismatches);
  return o;
}

Outcome ontology_filter() {
  const auto store = OntologyStore::load(fixture_ontology());
  const auto rf = store.umls_to_ordo(ConceptId::umls("C0035436"));
  const auto pml = store.icd9_to_ordo(ConceptId::icd9("0463"));
  const auto hyper = store.umls_to_ordo(ConceptId::umls("C0020473"));
  const bool lookups = rf == std::set{ConceptId::ordo("Orphanet_3099")} &&
                       pml == std::set{ConceptId::ordo("Orphanet_217260")} && hyper.empty();

  TempDir dir("acceptance-judgments");
  std::ostringstream tsv;
  tsv << "umls_id\tordo_id\tcorrect\n";
  for (std::size_t i = 0; i < 95; ++i) {
    const bool correct = i < 83;
    const std::size_t repeats = correct ? (i == 0 ? 876 - 82 : 1) : (i == 83 ? 1073 - 876 - 11 : 1);
    for (std::size_t r = 0; r < repeats; ++r) {
      tsv << cui_code(i) << "\tOrphanet_" << (i + 1) << "\t" << (correct ? 1 : 0) << "\n";
    }
  }
  io::write_file(dir / "judgments.tsv", tsv.str());
  const auto acc = matching_accuracy(io::read_match_judgments(dir / "judgments.tsv"));
  const bool figures = acc.unique_correct == 83 && acc.unique_total == 95 &&
                       acc.mention_correct == 876 && acc.mention_total == 1073 &&
                       near_pct(acc.unique_accuracy(), 87.4) && near_pct(acc.mention_accuracy(), 81.6);
  Outcome o;
  o.ok = lookups && figures;
  o.detail = fmt("lookups %s; unique %zu/%zu = %.1f%%, mentions %zu/%zu = %.1f%%",
                 lookups ? "ok" : "WRONG", acc.unique_correct, acc.unique_total,
                 pct(acc.unique_accuracy()), acc.mention_correct, acc.mention_total,
                 pct(acc.mention_accuracy()));
  return o;
}

Outcome gradient() {
  Gen gen(606);
  double worst = 0.0;
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = gen.size(2, 15), d = gen.size(1, 8);
    std::vector<std::vector<double>> x;
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(gen.vec(d));
      y.push_back(static_cast<int>(gen.chance(0.5)));
    }
    const GradientPoint pt{gen.vec(d, 0.7), gen.normal()};
    worst = std::max(worst, gradient_check(std::span<const std::vector<double>>(x),
                                           std::span<const int>(y), pt, gen.real(0.0, 2.0)));
  }
  Outcome o;
  o.ok = worst < 1e-5;
  o.detail = fmt("max relative error %.3g over 20 instances", worst);
  return o;
}

Outcome end_to_end() {
  const SyntheticCorpus syn = make_synthetic_corpus({600, 120, 7});
  PipelineConfig cfg;
  cfg.rules = {3, 0.005};
  cfg.baseline_dim = 64;
  cfg.train.learning_rate = 0.5;
  cfg.train.epochs = 300;
  cfg.train.l2 = 0.01;
  const Pipeline p(cfg, OntologyStore(syn.tables), syn.synonyms, TriggerConfig::defaults(), nullptr);
  std::vector<Document> docs;
  for (const auto& d : syn.docs) docs.push_back(p.prepare(d));

  const Extraction ex = p.extract(docs);
  const WeakDataset weak = p.weak_label(ex);
  const LogRegModel model = p.train_weak_model(weak);

  std::map<CandidateKey, bool> raw;
  for (const auto& c : ex.filtered) raw[CandidateKey::of(c)] = true;
  std::map<CandidateKey, bool> confirmed;
  for (const auto& d : p.infer_corpus(docs, model)) {
    for (const auto& e : d.evidence) confirmed[CandidateKey::of(e.candidate)] = e.confirmed;
  }
  const auto before = mention_metrics(raw, syn.gold);
  const auto after = mention_metrics(confirmed, syn.gold);
  Outcome o;
  o.ok = after.precision >= before.precision + 0.30 && after.recall >= 0.9 * before.recall;
  o.detail = fmt("%zu docs, weak %zu+/%zu-/%zu?; raw P=%.3f R=%.3f -> model P=%.3f R=%.3f",
                 docs.size(), weak.positives(), weak.negatives(), weak.unlabeled.size(),
                 before.precision, before.recall, after.precision, after.recall);
  return o;
}

Outcome filter_only_shrinks() {
  const Pipeline p(PipelineConfig::load(fixture("config.yaml")));
  const auto docs = p.load_corpus();
  const Extraction ex = p.extract(docs);
  const LogRegModel model = p.train_weak_model(p.weak_label(ex));
  std::size_t violations = 0, checked = 0;
  for (const auto& d : docs) {
    const auto r = p.infer_document(d, model, ex.prior);
    std::vector<MentionCandidate> mine;
    for (const auto& c : ex.filtered) {
      if (c.doc_id == d.doc_id) mine.push_back(c);
    }
    const auto all = unfiltered_ordo(mine, p.store());
    for (const auto& o : r.ordo) violations += all.contains(o) ? 0 : 1;
    ++checked;
  }
  Outcome o;
  o.ok = violations == 0 && checked == docs.size();
  o.detail = fmt("%zu documents, %zu violations", checked, violations);
  return o;
}

Outcome micro_oracle() {
  Gen gen(99);
  std::size_t mismatches = 0;
  for (int round = 0; round < 100; ++round) {
    const std::size_t n_adm = gen.size(1, 8), n_lab = gen.size(1, 6);
    std::set<ConceptId> universe;
    std::set<std::string> universe_s;
    for (std::size_t l = 0; l < n_lab; ++l) {
      universe.insert(ConceptId::ordo("Orphanet_" + std::to_string(l + 1)));
      universe_s.insert("Orphanet_" + std::to_string(l + 1));
    }
    AdmissionLabels pred, gold;
    std::map<std::string, std::set<std::string>> pred_s, gold_s;
    for (std::size_t a = 0; a < n_adm; ++a) {
      const std::string id = "adm" + std::to_string(a);
      for (std::size_t l = 0; l < n_lab; ++l) {
        const std::string code = "Orphanet_" + std::to_string(l + 1);
        if (gen.chance(0.35)) {
          pred[id].insert(ConceptId::ordo(code));
          pred_s[id].insert(code);
        }
        if (gen.chance(0.35)) {
          gold[id].insert(ConceptId::ordo(code));
          gold_s[id].insert(code);
        }
      }
    }
    const auto m = micro_admission_metrics(pred, gold, universe);
    const Confusion c = enumerate_confusion(pred_s, gold_s, universe_s);
    const auto want = metrics_from_counts(c.tp, c.fp, c.fn, c.tp + c.fp + c.fn + c.tn);
    if (!(m == want)) ++mismatches;
  }
  Outcome o;
  o.ok = mismatches == 0;
  o.detail = fmt("100 instances, %zu mismatches", mismatches);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_ms;  // 0 = no time limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"metric arithmetic reproduction", 1000, metric_arithmetic},
      {"weak-label partition", 1000, weak_partition},
      {"reported count consistency", 0, paper_counts},
      {"matcher oracle equivalence", 5000, matcher_oracle},
      {"ontology filter behaviour", 0, ontology_filter},
      {"gradient check", 5000, gradient},
      {"end-to-end synthetic precision lift", 60000, end_to_end},
      {"filter-only-shrinks", 0, filter_only_shrinks},
      {"micro-metric oracle", 0, micro_oracle},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_ms > 0 && ms > c.budget_ms) {
      o.ok = false;
      o.detail += fmt(" (over the %.0f ms budget)", c.budget_ms);
    }
    failures += o.ok ? 0 : 1;
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << c.name << "  [" << fmt("%.1f ms", ms)
              << "]  " << o.detail << "\n";
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
