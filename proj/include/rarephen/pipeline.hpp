#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rarephen/config.hpp"
#include "rarephen/eval.hpp"
#include "rarephen/model.hpp"
#include "rarephen/nerl.hpp"
#include "rarephen/ontology.hpp"
#include "rarephen/represent.hpp"
#include "rarephen/weaklabel.hpp"

namespace rarephen {

struct Evidence {
  MentionCandidate candidate;
  double probability = 0.0;
  bool confirmed = false;
  std::set<ConceptId> ordo;  // empty when the CUI has no usable ORDO link

  bool mapped() const { return !ordo.empty(); }
};

struct DocumentInference {
  std::string doc_id;
  std::optional<std::string> admission_id;
  std::set<ConceptId> ordo;
  std::vector<Evidence> evidence;
};

struct AdmissionResult {
  std::string admission_id;
  std::set<ConceptId> ordo_set;
  std::vector<Evidence> evidence;
};

struct Extraction {
  std::vector<MentionCandidate> raw;       // before context filtering
  std::vector<MentionCandidate> filtered;  // the link list L
  CorpusPrior prior;
};

using GoldPair = std::pair<MentionCandidate, bool>;

class Pipeline {
 public:
  // Loads ontology, dictionary and triggers from the files named in `config`.
  explicit Pipeline(PipelineConfig config);
  Pipeline(PipelineConfig config, OntologyStore store, const std::vector<SynonymEntry>& dictionary,
           TriggerConfig triggers, std::shared_ptr<const EmbeddingProvider> provider);

  const PipelineConfig& config() const { return config_; }
  const OntologyStore& store() const { return store_; }
  const DictionaryMatcher& matcher() const { return matcher_; }
  const EmbeddingProvider& provider() const { return *provider_; }
  const TriggerConfig& triggers() const { return triggers_; }

  std::vector<Document> load_corpus() const;
  // Fills in sections from the configured header patterns.
  Document prepare(Document doc) const;

  Extraction extract(const std::vector<Document>& docs) const;
  WeakDataset weak_label(const Extraction& extraction) const;
  WeakDataset create_weak_training_data(const std::vector<Document>& docs) const;

  LogRegModel train_weak_model(const WeakDataset& weak) const;
  LogRegModel train_strong_model(const std::vector<GoldPair>& gold,
                                 std::optional<std::size_t> max_rows = std::nullopt) const;

  DocumentInference infer_document(const Document& doc, const LogRegModel& model,
                                   const CorpusPrior& prior) const;
  std::vector<DocumentInference> infer_corpus(const std::vector<Document>& docs,
                                              const LogRegModel& model) const;

  std::string params_hash() const;

 private:
  LogRegModel train_pairs(const std::vector<MentionCandidate>& candidates,
                          const std::vector<int>& labels, Provenance provenance) const;

  PipelineConfig config_;
  OntologyStore store_;
  DictionaryMatcher matcher_;
  TriggerConfig triggers_;
  ContextFilter filter_;
  std::shared_ptr<const EmbeddingProvider> provider_;
};

std::shared_ptr<const EmbeddingProvider> make_provider(const PipelineConfig& config);

// Documents without an admission id are grouped under their doc id.
std::vector<AdmissionResult> aggregate_admissions(const std::vector<DocumentInference>& docs);

AdmissionLabels icd_admission_baseline(const std::map<std::string, std::vector<std::string>>& codes,
                                       const OntologyStore& store);
AdmissionLabels admission_labels(const std::vector<AdmissionResult>& results);
AdmissionLabels union_labels(const AdmissionLabels& a, const AdmissionLabels& b);

// ORDO set reached by mapping every candidate without the model.
std::set<ConceptId> unfiltered_ordo(const std::vector<MentionCandidate>& candidates,
                                    const OntologyStore& store);

}  // namespace rarephen
