#include "rarephen/cli.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>

#include "CLI11.hpp"
#include "rarephen/digest.hpp"
#include "rarephen/error.hpp"
#include "rarephen/io.hpp"
#include "rarephen/pipeline.hpp"

#ifndef RAREPHEN_VERSION
#define RAREPHEN_VERSION "0.0.0"
#endif

namespace rarephen::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::string out_dir = ".";
};

// Collects what goes into a run manifest.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv)
      : command_(std::move(command)), argv_(argv) {}

  void input(const std::string& name, const fs::path& path) {
    inputs_[name] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  }
  void output(const std::string& name, const fs::path& path) {
    outputs_[name] = {{"path", path.string()}, {"sha256", sha256_file(path)}};
  }
  json& counts() { return counts_; }
  json& extra() { return extra_; }

  void write(const fs::path& out_dir, const PipelineConfig& config) const {
    json j = {{"tool", "rarephen"},
              {"version", RAREPHEN_VERSION},
              {"command", command_},
              {"argv", argv_},
              {"seed", config.seed},
              {"config", config.snapshot()},
              {"inputs", inputs_},
              {"outputs", outputs_},
              {"counts", counts_}};
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    io::write_file(out_dir / ("manifest-" + command_ + ".json"), j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  json inputs_ = json::object();
  json outputs_ = json::object();
  json counts_ = json::object();
  json extra_ = json::object();
};

PipelineConfig load_config(const Globals& g) {
  if (g.config.empty()) throw CLI::RequiredError("--config");
  PipelineConfig config = PipelineConfig::load(g.config);
  if (g.seed) {
    config.seed = *g.seed;
    config.train.seed = *g.seed;
  }
  if (g.threads) config.threads = *g.threads;
  return config;
}

void record_pipeline_inputs(Manifest& m, const Globals& g, const PipelineConfig& c) {
  m.input("config", g.config);
  m.input("corpus", c.corpus);
  m.input("synonyms", c.synonyms);
  if (c.triggers) m.input("triggers", *c.triggers);
  m.input("ordo_umls", c.ontology.ordo_umls);
  m.input("ordo_icd10", c.ontology.ordo_icd10);
  m.input("icd9_icd10", c.ontology.icd9_icd10);
  m.input("icd9_umls", c.ontology.icd9_umls);
  m.input("ordo_meta", c.ontology.ordo_meta);
}

fs::path or_default(const std::string& given, const fs::path& out_dir, const char* name) {
  return given.empty() ? out_dir / name : fs::path(given);
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kIo, "missing " + what + ": " + path.string());
  }
}

std::map<CandidateKey, std::size_t> index_candidates(const std::vector<MentionCandidate>& c) {
  std::map<CandidateKey, std::size_t> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.emplace(CandidateKey::of(c[i]), i);
  return out;
}

// Rule parameters recorded by an earlier weaklabel run, if any.
std::optional<WeakRuleParams> recorded_params(const fs::path& out_dir) {
  const fs::path path = out_dir / "manifest-weaklabel.json";
  if (!fs::exists(path)) return std::nullopt;
  const json j = json::parse(io::read_file(path));
  if (!j.contains("params")) return std::nullopt;
  return WeakRuleParams{j["params"].at("l").get<std::size_t>(), j["params"].at("p").get<double>()};
}

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---- extract ---------------------------------------------------------------

void cmd_extract(const Globals& g, const std::vector<std::string>& argv, std::ostream& out) {
  const PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  Pipeline pipeline(config);
  const auto docs = pipeline.load_corpus();
  const Extraction ex = pipeline.extract(docs);

  const fs::path candidates = dir / "candidates.jsonl";
  const fs::path freq = dir / "prefilter_freq.json";
  io::write_candidates_jsonl(candidates, ex.filtered);
  io::write_file(freq, io::frequency_to_json(FrequencyTable::over(ex.raw)).dump(2) + "\n");

  Manifest m("extract", argv);
  record_pipeline_inputs(m, g, config);
  m.output("candidates", candidates);
  m.output("prefilter_freq", freq);
  m.counts() = {{"documents", docs.size()},
                {"raw_links", ex.raw.size()},
                {"candidates", ex.filtered.size()},
                {"context_filtered", ex.raw.size() - ex.filtered.size()}};
  m.write(dir, config);
  out << "extract: " << ex.filtered.size() << " candidates (" << ex.raw.size()
      << " before context filtering) from " << docs.size() << " documents\n";
}

// ---- weaklabel -------------------------------------------------------------

struct WeaklabelArgs {
  std::string candidates;
  std::string prefilter_freq;
  bool grid = false;
  std::string gold;
  std::string tune = "f1";
};

void cmd_weaklabel(const Globals& g, const WeaklabelArgs& a, const std::vector<std::string>& argv,
                   std::ostream& out) {
  PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  const fs::path cand_path = or_default(a.candidates, dir, "candidates.jsonl");
  require_file(cand_path, "candidate file (run extract first)");
  const auto candidates = io::read_candidates_jsonl(cand_path);

  Manifest m("weaklabel", argv);
  m.input("config", g.config);
  m.input("candidates", cand_path);

  FrequencyTable freq;
  if (config.frequency_scope == FrequencyScope::kPreFilter) {
    const fs::path fpath = or_default(a.prefilter_freq, dir, "prefilter_freq.json");
    require_file(fpath, "pre-filter frequency table (run extract first)");
    m.input("prefilter_freq", fpath);
    freq = io::frequency_from_json(json::parse(io::read_file(fpath)));
  } else {
    freq = FrequencyTable::over(candidates);
  }

  WeakRuleParams params = config.rules;
  if (a.grid) {
    m.input("gold", a.gold);
    const auto gold = io::read_gold_csv(a.gold);
    Pipeline pipeline(config);
    const auto vectors = represent_candidates(candidates, pipeline.provider(), config.encoding);
    const auto index = index_candidates(candidates);

    const GridScorer scorer = [&](const WeakRuleParams&, const WeakDataset& weak) {
      std::vector<std::vector<double>> x;
      std::vector<int> y;
      for (const auto& pair : weak.labeled) {
        x.push_back(vectors[pair.index].values);
        y.push_back(pair.rules.y_weak().value_or(false) ? 1 : 0);
      }
      LogRegModel model;
      try {
        model = train(std::span<const std::vector<double>>(x), std::span<const int>(y),
                      config.train);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::kSingleClass || e.kind() == ErrorKind::kEmptyInput) {
          return std::nan("");
        }
        throw;
      }
      std::map<CandidateKey, bool> predictions;
      for (const auto& row : gold) {
        auto it = index.find(row.key);
        if (it != index.end()) predictions[row.key] = decide(predict(model, vectors[it->second]));
      }
      const MetricsReport r = mention_metrics(predictions, gold);
      return a.tune == "recall" ? r.recall : r.f1;
    };

    const GridResult result = grid_search(candidates, ParamGrid::defaults(), scorer, freq);
    std::string table = "p\tl\t" + a.tune + "\n";
    for (const auto& cell : result.table) {
      table += shortest(cell.params.p) + "\t" + std::to_string(cell.params.l) +
               "\t" + format_double(cell.score) + "\n";
    }
    const fs::path grid_path = dir / "grid.tsv";
    io::write_file(grid_path, table);
    m.output("grid", grid_path);
    m.extra()["grid"] = {{"metric", a.tune},
                         {"best", {{"l", result.best.l}, {"p", result.best.p}}},
                         {"best_score", std::isnan(result.best_score)
                                            ? json(nullptr)
                                            : json(result.best_score)}};
    params = result.best;
    out << "weaklabel: grid of " << result.table.size() << " cells, best p=" << params.p
        << " l=" << params.l << " (" << a.tune << " " << format_double(result.best_score) << ")\n";
  }

  const WeakDataset weak = weak_label(candidates, params, freq);
  const fs::path weak_path = dir / "weak.jsonl";
  io::write_weak_jsonl(weak_path, weak);
  m.output("weak", weak_path);
  m.extra()["params"] = {{"l", params.l}, {"p", params.p}};
  m.extra()["total_links"] = weak.total_links;
  m.counts() = {{"candidates", candidates.size()},
                {"positives", weak.positives()},
                {"negatives", weak.negatives()},
                {"unlabeled", weak.unlabeled.size()}};
  m.write(dir, config);
  out << "weaklabel: " << weak.positives() << " positive, " << weak.negatives() << " negative, "
      << weak.unlabeled.size() << " unlabeled of " << candidates.size() << "\n";
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string kind = "weak";
  std::string weak;
  std::string gold;
  std::string candidates;
  std::optional<std::size_t> max_rows;
};

void cmd_train(const Globals& g, const TrainArgs& a, const std::vector<std::string>& argv,
               std::ostream& out) {
  PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  const TrainingKind kind = parse_training_kind(a.kind);
  Manifest m("train", argv);
  m.input("config", g.config);

  LogRegModel model;
  if (kind == TrainingKind::kWeak) {
    if (auto recorded = recorded_params(dir)) config.rules = *recorded;
    const fs::path weak_path = or_default(a.weak, dir, "weak.jsonl");
    require_file(weak_path, "weak dataset (run weaklabel first)");
    m.input("weak", weak_path);
    const WeakDataset weak = io::read_weak_jsonl(weak_path, config.rules);
    Pipeline pipeline(config);
    model = pipeline.train_weak_model(weak);
    m.counts() = {{"training_rows", weak.labeled.size()},
                  {"positives", weak.positives()},
                  {"negatives", weak.negatives()}};
  } else {
    if (a.gold.empty()) throw CLI::RequiredError("--gold (required with --kind strong)");
    const fs::path cand_path = or_default(a.candidates, dir, "candidates.jsonl");
    require_file(cand_path, "candidate file (run extract first)");
    m.input("gold", a.gold);
    m.input("candidates", cand_path);
    const auto candidates = io::read_candidates_jsonl(cand_path);
    const auto index = index_candidates(candidates);
    std::vector<GoldPair> pairs;
    std::size_t unmatched = 0;
    for (const auto& row : io::read_gold_csv(a.gold)) {
      auto it = index.find(row.key);
      if (it == index.end()) {
        ++unmatched;
        continue;
      }
      pairs.emplace_back(candidates[it->second], row.label_umls);
    }
    if (unmatched > 0) {
      spdlog::warn("{} gold rows have no extracted candidate and are not used for training",
                   unmatched);
    }
    Pipeline pipeline(config);
    model = pipeline.train_strong_model(pairs, a.max_rows);
    const std::size_t used = std::min(pairs.size(), a.max_rows.value_or(pairs.size()));
    m.counts() = {{"training_rows", used}, {"gold_unmatched", unmatched}};
  }

  const fs::path model_path = dir / "model.txt";
  save(model, model_path);
  m.output("model", model_path);
  m.extra()["training_kind"] = std::string(to_string(kind));
  m.extra()["params"] = {{"l", config.rules.l}, {"p", config.rules.p}};
  m.write(dir, config);
  out << "train: " << to_string(kind) << " model, dim " << model.dim() << ", "
      << m.counts()["training_rows"].get<std::size_t>() << " rows\n";
}

// ---- infer -----------------------------------------------------------------

void cmd_infer(const Globals& g, const std::string& model_arg, const std::vector<std::string>& argv,
               std::ostream& out) {
  const PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  const fs::path model_path = or_default(model_arg, dir, "model.txt");
  require_file(model_path, "model (run train first)");
  const LogRegModel model = load(model_path);

  Pipeline pipeline(config);
  const auto docs = pipeline.load_corpus();
  const auto inferred = pipeline.infer_corpus(docs, model);
  const auto results = aggregate_admissions(inferred);
  const fs::path results_path = dir / "results.jsonl";
  io::write_results_jsonl(results_path, results);

  std::size_t evidence = 0;
  std::size_t confirmed = 0;
  std::size_t labels = 0;
  for (const auto& r : results) {
    evidence += r.evidence.size();
    labels += r.ordo_set.size();
    for (const auto& e : r.evidence) confirmed += e.confirmed ? 1 : 0;
  }
  Manifest m("infer", argv);
  record_pipeline_inputs(m, g, config);
  m.input("model", model_path);
  m.output("results", results_path);
  m.counts() = {{"documents", docs.size()},
                {"admissions", results.size()},
                {"candidates", evidence},
                {"confirmed", confirmed},
                {"admission_labels", labels}};
  m.write(dir, config);
  out << "infer: " << confirmed << " of " << evidence << " candidates confirmed, "
      << results.size() << " admissions\n";
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string gold;
  std::string split;
  std::string admission_gold;
  std::string results;
  std::string candidates;
  std::string weak;
};

json method_metrics(const std::map<std::string, std::map<CandidateKey, bool>>& methods,
                    const std::vector<GoldMentionLabel>& gold) {
  json j = json::object();
  for (const auto& [name, predictions] : methods) {
    j[name] = io::metrics_to_json(mention_metrics(predictions, gold));
  }
  return j;
}

// Every mapped candidate counts, confirmed or not.
AdmissionLabels unfiltered_admission_labels(const std::vector<AdmissionResult>& results) {
  AdmissionLabels out;
  for (const auto& r : results) {
    auto& labels = out[r.admission_id];
    for (const auto& e : r.evidence) labels.insert(e.ordo.begin(), e.ordo.end());
  }
  return out;
}

std::set<ConceptId> label_universe(std::initializer_list<const AdmissionLabels*> sets) {
  std::set<ConceptId> out;
  for (const auto* s : sets) {
    for (const auto& [admission, labels] : *s) out.insert(labels.begin(), labels.end());
  }
  return out;
}

void cmd_evaluate(const Globals& g, const EvaluateArgs& a, const std::vector<std::string>& argv,
                  std::ostream& out) {
  const PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  const fs::path results_path = or_default(a.results, dir, "results.jsonl");
  const fs::path cand_path = or_default(a.candidates, dir, "candidates.jsonl");
  const fs::path weak_path = or_default(a.weak, dir, "weak.jsonl");
  require_file(results_path, "results (run infer first)");
  require_file(cand_path, "candidate file (run extract first)");
  if (!a.split.empty()) require_file(weak_path, "weak dataset (run weaklabel first)");

  Manifest m("evaluate", argv);
  m.input("config", g.config);
  m.input("gold", a.gold);
  m.input("results", results_path);
  m.input("candidates", cand_path);

  const auto gold = io::read_gold_csv(a.gold);
  const auto results = io::read_results_jsonl(results_path);
  const auto candidates = io::read_candidates_jsonl(cand_path);

  std::map<std::string, std::map<CandidateKey, bool>> methods;
  for (const auto& c : candidates) methods["ner"][CandidateKey::of(c)] = true;
  for (const auto& r : results) {
    for (const auto& e : r.evidence) methods["model"][CandidateKey::of(e.candidate)] = e.confirmed;
  }
  std::map<CandidateKey, RuleEvaluation> rules;
  if (fs::exists(weak_path)) {
    m.input("weak", weak_path);
    for (const auto& pair : io::read_weak_jsonl(weak_path).in_input_order()) {
      const CandidateKey key = CandidateKey::of(pair.candidate);
      rules[key] = pair.rules;
      methods["rules"][key] = pair.rules.lambda1 && pair.rules.lambda2;
    }
  }

  const auto index = index_candidates(candidates);
  std::size_t unmatched = 0;
  for (const auto& row : gold) unmatched += index.contains(row.key) ? 0 : 1;

  json report = {{"mention", method_metrics(methods, gold)},
                 {"gold", {{"rows", gold.size()}, {"unmatched", unmatched}}}};

  if (!a.split.empty()) {
    std::vector<CandidateKey> keys;
    for (const auto& row : gold) {
      if (rules.contains(row.key)) keys.push_back(row.key);
    }
    const SeenUnseenSplit split = seen_unseen_split(keys, rules);
    const std::pair<const char*, const std::set<CandidateKey>*> parts[] = {
        {"seen", &split.seen},
        {"unseen", &split.unseen},
        {"unseen_lambda1", &split.unseen_lambda1},
        {"unseen_lambda2", &split.unseen_lambda2}};
    json splits = json::object();
    for (const auto& [name, keyset] : parts) {
      std::vector<GoldMentionLabel> subset;
      for (const auto& row : gold) {
        if (keyset->contains(row.key)) subset.push_back(row);
      }
      splits[name] = method_metrics(methods, subset);
      splits[name]["rows"] = subset.size();
    }
    report["splits"] = splits;
    report["splits"]["excluded_unmatched"] = gold.size() - keys.size();
  }

  if (!a.admission_gold.empty()) {
    m.input("admission_gold", a.admission_gold);
    const AdmissionLabels admission_gold = io::read_admission_labels_csv(a.admission_gold);
    const AdmissionLabels model_labels = admission_labels(results);
    const AdmissionLabels ner_labels = unfiltered_admission_labels(results);
    const auto universe = label_universe({&admission_gold, &model_labels, &ner_labels});
    report["admission"] = {
        {"model", io::metrics_to_json(micro_admission_metrics(model_labels, admission_gold, universe))},
        {"ner", io::metrics_to_json(micro_admission_metrics(ner_labels, admission_gold, universe))}};
  }

  const fs::path report_path = dir / "report.json";
  io::write_file(report_path, report.dump(2) + "\n");
  m.output("report", report_path);
  m.counts() = {{"gold_rows", gold.size()}, {"gold_unmatched", unmatched}};
  m.write(dir, config);
  const json& mm = report["mention"]["model"];
  out << "evaluate: model P=" << format_double(mm["precision"].get<double>())
      << " R=" << format_double(mm["recall"].get<double>())
      << " F1=" << format_double(mm["f1"].get<double>()) << "\n";
}

// ---- compare-icd -----------------------------------------------------------

void cmd_compare_icd(const Globals& g, const std::string& icd, const std::string& results_arg,
                     const std::string& admission_gold_path, const std::vector<std::string>& argv,
                     std::ostream& out) {
  const PipelineConfig config = load_config(g);
  const fs::path dir = g.out_dir;
  fs::create_directories(dir);
  const fs::path results_path = or_default(results_arg, dir, "results.jsonl");
  require_file(results_path, "results (run infer first)");

  Manifest m("compare-icd", argv);
  m.input("config", g.config);
  m.input("icd", icd);
  m.input("results", results_path);

  const Pipeline pipeline(config);
  const AdmissionLabels icd_labels = icd_admission_baseline(io::read_icd_csv(icd), pipeline.store());
  const AdmissionLabels nlp_labels = admission_labels(io::read_results_jsonl(results_path));

  struct Counts {
    std::size_t nlp_only = 0, icd_only = 0, both = 0;
  };
  std::map<ConceptId, Counts> per_ordo;
  std::set<std::string> admissions;
  for (const auto& [id, _] : icd_labels) admissions.insert(id);
  for (const auto& [id, _] : nlp_labels) admissions.insert(id);
  for (const auto& id : admissions) {
    static const std::set<ConceptId> none;
    auto find = [&](const AdmissionLabels& l) -> const std::set<ConceptId>& {
      auto it = l.find(id);
      return it == l.end() ? none : it->second;
    };
    const auto& nlp = find(nlp_labels);
    const auto& icd_set = find(icd_labels);
    for (const auto& o : nlp) {
      if (icd_set.contains(o)) {
        ++per_ordo[o].both;
      } else {
        ++per_ordo[o].nlp_only;
      }
    }
    for (const auto& o : icd_set) {
      if (!nlp.contains(o)) ++per_ordo[o].icd_only;
    }
  }

  json rows = json::array();
  for (const auto& [ordo, c] : per_ordo) {
    const OrdoMeta* meta = pipeline.store().meta(ordo);
    rows.push_back({{"ordo", ordo.code()},
                    {"label", meta ? json(meta->preferred_label) : json(nullptr)},
                    {"nlp_only", c.nlp_only},
                    {"icd_only", c.icd_only},
                    {"both", c.both}});
  }
  json report = {{"admissions", admissions.size()}, {"per_ordo", rows}};

  if (!admission_gold_path.empty()) {
    m.input("admission_gold", admission_gold_path);
    const AdmissionLabels gold = io::read_admission_labels_csv(admission_gold_path);
    const AdmissionLabels both = union_labels(nlp_labels, icd_labels);
    const auto universe = label_universe({&gold, &both});
    report["admission_metrics"] = {
        {"icd", io::metrics_to_json(micro_admission_metrics(icd_labels, gold, universe))},
        {"nlp", io::metrics_to_json(micro_admission_metrics(nlp_labels, gold, universe))},
        {"union", io::metrics_to_json(micro_admission_metrics(both, gold, universe))}};
  }

  const fs::path report_path = dir / "icd_comparison.json";
  io::write_file(report_path, report.dump(2) + "\n");
  m.output("icd_comparison", report_path);
  m.counts() = {{"admissions", admissions.size()}, {"ordo_concepts", per_ordo.size()}};
  m.write(dir, config);
  out << "compare-icd: " << per_ordo.size() << " ORDO concepts over " << admissions.size()
      << " admissions\n";
}

// ---- replay ----------------------------------------------------------------

std::vector<std::string> replay_argv(const fs::path& manifest_path) {
  const json j = json::parse(io::read_file(manifest_path));
  for (const auto& [name, entry] : j.at("inputs").items()) {
    const fs::path path = entry.at("path").get<std::string>();
    if (!fs::exists(path)) {
      throw Error(ErrorKind::kIo, "replay: input '" + name + "' is missing: " + path.string());
    }
    if (sha256_file(path) != entry.at("sha256").get<std::string>()) {
      throw Error(ErrorKind::kCorruptFile,
                  "replay: input '" + name + "' changed since the recorded run: " + path.string());
    }
  }
  return j.at("argv").get<std::vector<std::string>>();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rare-disease phenotyping from clinical notes", "rarephen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", RAREPHEN_VERSION);

  Globals g;
  app.add_option("--config", g.config, "Pipeline configuration (YAML)");
  app.add_option("--seed", g.seed, "Override the configured seed");
  app.add_option("--threads", g.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for artifacts and manifests");

  auto* extract = app.add_subcommand("extract", "Extract and context-filter candidates");
  extract->fallthrough();

  WeaklabelArgs wl;
  auto* weaklabel = app.add_subcommand("weaklabel", "Apply the weak labelling rules");
  weaklabel->fallthrough();
  weaklabel->add_option("--candidates", wl.candidates, "Candidate JSONL");
  weaklabel->add_option("--prefilter-freq", wl.prefilter_freq, "Pre-filter frequency table");
  auto* gold_opt = weaklabel->add_option("--gold", wl.gold, "Gold CSV for grid scoring")
                       ->check(CLI::ExistingFile);
  weaklabel->add_flag("--grid", wl.grid, "Search p and l over the default grid")->needs(gold_opt);
  weaklabel->add_option("--tune", wl.tune, "Grid metric")
      ->check(CLI::IsMember({"f1", "recall"}));

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a phenotype confirmation model");
  train_cmd->fallthrough();
  train_cmd->add_option("--kind", tr.kind, "weak or strong")
      ->check(CLI::IsMember({"weak", "strong"}));
  train_cmd->add_option("--weak", tr.weak, "Weak dataset JSONL");
  train_cmd->add_option("--gold", tr.gold, "Gold CSV (strong training)")->check(CLI::ExistingFile);
  train_cmd->add_option("--candidates", tr.candidates, "Candidate JSONL (strong training)");
  train_cmd->add_option("--max-rows", tr.max_rows, "Use only the first N gold rows");

  std::string model_path;
  auto* infer = app.add_subcommand("infer", "Confirm candidates and aggregate per admission");
  infer->fallthrough();
  infer->add_option("--model", model_path, "Model file");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score results against gold labels");
  evaluate->fallthrough();
  evaluate->add_option("--gold", ev.gold, "Mention-level gold CSV")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--split", ev.split, "Breakdown")->check(CLI::IsMember({"seen-unseen"}));
  evaluate->add_option("--admission-gold", ev.admission_gold, "Admission-level gold CSV")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--results", ev.results, "Results JSONL");
  evaluate->add_option("--candidates", ev.candidates, "Candidate JSONL");
  evaluate->add_option("--weak", ev.weak, "Weak dataset JSONL");

  std::string icd_path;
  std::string icd_results;
  std::string icd_admission_gold;
  auto* compare = app.add_subcommand("compare-icd", "Compare NLP and ICD-9 admission phenotypes");
  compare->fallthrough();
  compare->add_option("--icd", icd_path, "admission_id,icd9_code CSV")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--results", icd_results, "Results JSONL");
  compare->add_option("--admission-gold", icd_admission_gold, "Admission-level gold CSV")
      ->check(CLI::ExistingFile);

  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (extract->parsed()) cmd_extract(g, args, out);
    if (weaklabel->parsed()) cmd_weaklabel(g, wl, args, out);
    if (train_cmd->parsed()) cmd_train(g, tr, args, out);
    if (infer->parsed()) cmd_infer(g, model_path, args, out);
    if (evaluate->parsed()) cmd_evaluate(g, ev, args, out);
    if (compare->parsed()) {
      cmd_compare_icd(g, icd_path, icd_results, icd_admission_gold, args, out);
    }
    if (replay->parsed()) return run(replay_argv(manifest_path), out, err);
  } catch (const CLI::Error& e) {
    err << "rarephen: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "rarephen: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "rarephen: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace rarephen::cli
