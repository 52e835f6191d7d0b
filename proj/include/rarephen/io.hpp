#pragma once

// File formats: corpus/candidate/weak/result JSONL, gold and ICD CSV.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rarephen/eval.hpp"
#include "rarephen/nerl.hpp"
#include "rarephen/pipeline.hpp"
#include "rarephen/weaklabel.hpp"

namespace rarephen::io {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split(std::string_view line, char sep);
std::vector<std::string> parse_csv_line(std::string_view line);

std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path);

json candidate_to_json(const MentionCandidate& c);
MentionCandidate candidate_from_json(const json& j);
void write_candidates_jsonl(const std::filesystem::path& path,
                            const std::vector<MentionCandidate>& candidates);
std::vector<MentionCandidate> read_candidates_jsonl(const std::filesystem::path& path);

json frequency_to_json(const FrequencyTable& freq);
FrequencyTable frequency_from_json(const json& j);

// Candidate fields plus lambda1, lambda2 and y_weak (null when unselected),
// one line per input candidate in input order.
void write_weak_jsonl(const std::filesystem::path& path, const WeakDataset& weak);
WeakDataset read_weak_jsonl(const std::filesystem::path& path, const WeakRuleParams& params = {});

// doc_id,m_start,m_end,cui,label_umls[,ordo_id,label_ordo]
std::vector<GoldMentionLabel> read_gold_csv(const std::filesystem::path& path);

// admission_id,icd9_code
std::map<std::string, std::vector<std::string>> read_icd_csv(const std::filesystem::path& path);

// admission_id,ordo_id
AdmissionLabels read_admission_labels_csv(const std::filesystem::path& path);

// umls_id<TAB>ordo_id<TAB>correct (0/1), one row per mention
std::vector<MatchJudgment> read_match_judgments(const std::filesystem::path& path);

json evidence_to_json(const Evidence& e);
Evidence evidence_from_json(const json& j);
void write_results_jsonl(const std::filesystem::path& path,
                         const std::vector<AdmissionResult>& results);
std::vector<AdmissionResult> read_results_jsonl(const std::filesystem::path& path);

json metrics_to_json(const MetricsReport& m);

}  // namespace rarephen::io
