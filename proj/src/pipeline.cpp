#include "rarephen/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "rarephen/digest.hpp"
#include "rarephen/error.hpp"
#include "rarephen/io.hpp"
#include "rarephen/parallel.hpp"
#include "rarephen/text.hpp"

namespace rarephen {

namespace {

void sort_candidates(std::vector<MentionCandidate>& v) {
  std::stable_sort(v.begin(), v.end(), [](const MentionCandidate& a, const MentionCandidate& b) {
    if (a.doc_id != b.doc_id) return a.doc_id < b.doc_id;
    if (a.m_start != b.m_start) return a.m_start < b.m_start;
    return a.m_end < b.m_end;
  });
}

}  // namespace

std::shared_ptr<const EmbeddingProvider> make_provider(const PipelineConfig& config) {
  if (config.provider == ProviderKind::kRemote) {
    return std::make_shared<RemoteProvider>(config.remote);
  }
  return std::make_shared<BaselineProvider>(config.baseline_dim, config.seed);
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  store_ = OntologyStore::load(config_.ontology);
  matcher_ = build_matcher(build_dictionary(store_, config_.synonyms));
  triggers_ = config_.triggers ? TriggerConfig::load(*config_.triggers) : TriggerConfig::defaults();
  filter_ = ContextFilter(triggers_);
  provider_ = make_provider(config_);
}

Pipeline::Pipeline(PipelineConfig config, OntologyStore store,
                   const std::vector<SynonymEntry>& dictionary, TriggerConfig triggers,
                   std::shared_ptr<const EmbeddingProvider> provider)
    : config_(std::move(config)),
      store_(std::move(store)),
      matcher_(build_matcher(build_dictionary(store_, dictionary))),
      triggers_(std::move(triggers)),
      filter_(triggers_),
      provider_(provider ? std::move(provider) : make_provider(config_)) {}

std::string Pipeline::params_hash() const {
  const auto snap = config_.snapshot();
  const nlohmann::json relevant = {{"rules", snap["rules"]},
                                   {"encoding", snap["encoding"]},
                                   {"train", snap["train"]},
                                   {"seed", snap["seed"]}};
  return sha256_hex(relevant.dump()).substr(0, 16);
}

Document Pipeline::prepare(Document doc) const {
  doc.sections = split_sections(doc.text, triggers_.section_headers);
  return doc;
}

Extraction Pipeline::extract(const std::vector<Document>& docs) const {
  Extraction out;
  out.prior = build_prior(docs, matcher_);
  std::vector<std::vector<MentionCandidate>> raw(docs.size());
  std::vector<std::vector<MentionCandidate>> kept(docs.size());
  parallel_for(docs.size(), config_.threads, [&](std::size_t i) {
    raw[i] = extract_candidates(docs[i], matcher_, out.prior, config_.encoding.window_tokens);
    kept[i] = filter_.apply(raw[i]);
  });
  for (std::size_t i = 0; i < docs.size(); ++i) {
    std::move(raw[i].begin(), raw[i].end(), std::back_inserter(out.raw));
    std::move(kept[i].begin(), kept[i].end(), std::back_inserter(out.filtered));
  }
  sort_candidates(out.raw);
  sort_candidates(out.filtered);
  return out;
}

WeakDataset Pipeline::weak_label(const Extraction& extraction) const {
  if (extraction.filtered.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no rare-disease candidates in the corpus");
  }
  const FrequencyTable freq = FrequencyTable::over(
      config_.frequency_scope == FrequencyScope::kPostFilter ? extraction.filtered
                                                             : extraction.raw);
  return rarephen::weak_label(extraction.filtered, config_.rules, freq);
}

WeakDataset Pipeline::create_weak_training_data(const std::vector<Document>& docs) const {
  return weak_label(extract(docs));
}

LogRegModel Pipeline::train_pairs(const std::vector<MentionCandidate>& candidates,
                                  const std::vector<int>& labels, Provenance provenance) const {
  const auto vectors = represent_candidates(candidates, *provider_, config_.encoding);
  return train(vectors, labels, config_.train, std::move(provenance));
}

LogRegModel Pipeline::train_weak_model(const WeakDataset& weak) const {
  std::vector<MentionCandidate> candidates;
  std::vector<int> labels;
  for (const auto& pair : weak.labeled) {
    candidates.push_back(pair.candidate);
    labels.push_back(pair.rules.y_weak().value_or(false) ? 1 : 0);
  }
  return train_pairs(candidates, labels,
                     {TrainingKind::kWeak, params_hash(), provider_->id(), config_.encoding});
}

LogRegModel Pipeline::train_strong_model(const std::vector<GoldPair>& gold,
                                         std::optional<std::size_t> max_rows) const {
  const std::size_t n = std::min(gold.size(), max_rows.value_or(gold.size()));
  std::vector<MentionCandidate> candidates;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    candidates.push_back(gold[i].first);
    labels.push_back(gold[i].second ? 1 : 0);
  }
  return train_pairs(candidates, labels,
                     {TrainingKind::kStrong, params_hash(), provider_->id(), config_.encoding});
}

DocumentInference Pipeline::infer_document(const Document& doc, const LogRegModel& model,
                                           const CorpusPrior& prior) const {
  DocumentInference out{doc.doc_id, doc.admission_id, {}, {}};
  const auto candidates = filter_.apply(
      extract_candidates(doc, matcher_, prior, config_.encoding.window_tokens));
  if (candidates.empty()) return out;
  const auto vectors = represent_candidates(candidates, *provider_, config_.encoding);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Evidence e;
    e.candidate = candidates[i];
    e.probability = predict(model, vectors[i]);
    e.confirmed = decide(e.probability);
    e.ordo = store_.umls_to_ordo(candidates[i].cui);
    if (e.confirmed) out.ordo.insert(e.ordo.begin(), e.ordo.end());
    out.evidence.push_back(std::move(e));
  }
  return out;
}

std::vector<DocumentInference> Pipeline::infer_corpus(const std::vector<Document>& docs,
                                                      const LogRegModel& model) const {
  if (model.dim() != provider_->dim()) {
    throw Error(ErrorKind::kDimensionMismatch,
                "model dimension " + std::to_string(model.dim()) + " does not match provider " +
                    provider_->id());
  }
  if (model.provenance.provider_id != provider_->id()) {
    spdlog::warn("model was trained with provider '{}', inferring with '{}'",
                 model.provenance.provider_id, provider_->id());
  }
  if (!(model.provenance.options == config_.encoding)) {
    spdlog::warn("model encoding options differ from the configured ones");
  }
  const CorpusPrior prior = build_prior(docs, matcher_);
  std::vector<DocumentInference> out(docs.size());
  parallel_for(docs.size(), config_.threads,
               [&](std::size_t i) { out[i] = infer_document(docs[i], model, prior); });
  return out;
}

std::vector<Document> Pipeline::load_corpus() const {
  std::vector<Document> docs = io::read_corpus_jsonl(config_.corpus);
  for (auto& d : docs) d = prepare(std::move(d));
  return docs;
}

std::vector<AdmissionResult> aggregate_admissions(const std::vector<DocumentInference>& docs) {
  std::map<std::string, AdmissionResult> grouped;
  for (const auto& d : docs) {
    const std::string& id = d.admission_id ? *d.admission_id : d.doc_id;
    AdmissionResult& a = grouped[id];
    a.admission_id = id;
    a.ordo_set.insert(d.ordo.begin(), d.ordo.end());
    a.evidence.insert(a.evidence.end(), d.evidence.begin(), d.evidence.end());
  }
  std::vector<AdmissionResult> out;
  out.reserve(grouped.size());
  for (auto& [id, a] : grouped) out.push_back(std::move(a));
  return out;
}

AdmissionLabels icd_admission_baseline(const std::map<std::string, std::vector<std::string>>& codes,
                                       const OntologyStore& store) {
  AdmissionLabels out;
  for (const auto& [admission, list] : codes) {
    auto& labels = out[admission];
    for (std::string code : list) {
      std::erase(code, '.');
      if (!ConceptId::valid(Scheme::kIcd9, code)) {
        spdlog::warn("admission {}: skipping unrecognised ICD-9 code '{}'", admission, code);
        continue;
      }
      labels.merge(store.icd9_to_ordo(ConceptId::icd9(code)));
    }
  }
  return out;
}

AdmissionLabels admission_labels(const std::vector<AdmissionResult>& results) {
  AdmissionLabels out;
  for (const auto& r : results) out[r.admission_id] = r.ordo_set;
  return out;
}

AdmissionLabels union_labels(const AdmissionLabels& a, const AdmissionLabels& b) {
  AdmissionLabels out = a;
  for (const auto& [admission, labels] : b) out[admission].insert(labels.begin(), labels.end());
  return out;
}

std::set<ConceptId> unfiltered_ordo(const std::vector<MentionCandidate>& candidates,
                                    const OntologyStore& store) {
  std::set<ConceptId> out;
  for (const auto& c : candidates) out.merge(store.umls_to_ordo(c.cui));
  return out;
}

}  // namespace rarephen
