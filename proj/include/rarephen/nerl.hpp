#pragma once

// Gazetteer NER+L: synonym dictionary, corpus-frequency disambiguation,
// context windows, document sections and trigger-based context filtering.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rarephen/matcher.hpp"
#include "rarephen/ontology.hpp"

namespace rarephen {

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Section {
  std::string name;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const Section&, const Section&) = default;
};

struct Document {
  std::string doc_id;
  std::optional<std::string> admission_id;
  std::string text;  // UTF-8
  std::vector<Section> sections;
};

struct SynonymEntry {
  std::string surface;  // normalized
  ConceptId cui;

  friend auto operator<=>(const SynonymEntry&, const SynonymEntry&) = default;
};

struct MentionCandidate {
  std::string doc_id;
  std::size_t m_start = 0;
  std::size_t m_end = 0;
  std::string surface;
  ConceptId cui;
  std::string context;
  Span window;
  std::optional<std::string> structure_name;
  Span mention_in_context;

  std::size_t length() const { return m_end - m_start; }
  friend bool operator==(const MentionCandidate&, const MentionCandidate&) = default;
};

// Reads a `surface<TAB>cui` file (header row required) and keeps the rows whose
// CUI is in the store's rare UMLS set.
// Raw `surface<TAB>cui` rows, unfiltered.
std::vector<SynonymEntry> read_synonyms(const std::filesystem::path& synonym_file);

std::vector<SynonymEntry> build_dictionary(const OntologyStore& store,
                                           const std::filesystem::path& synonym_file);
std::vector<SynonymEntry> build_dictionary(const OntologyStore& store,
                                           const std::vector<SynonymEntry>& rows);

// Matcher over the distinct dictionary surfaces plus the CUIs each surface
// may link to.
class DictionaryMatcher {
 public:
  DictionaryMatcher() = default;
  explicit DictionaryMatcher(const std::vector<SynonymEntry>& dictionary);

  const Matcher& matcher() const { return matcher_; }
  const std::string& surface(std::size_t pattern) const { return surfaces_[pattern]; }
  const std::vector<ConceptId>& cuis(std::size_t pattern) const { return cuis_[pattern]; }

 private:
  std::vector<std::string> surfaces_;
  std::vector<std::vector<ConceptId>> cuis_;
  Matcher matcher_;
};

DictionaryMatcher build_matcher(const std::vector<SynonymEntry>& dictionary);

// Corpus-frequency prior for ambiguous surfaces: normalized surface -> CUI ->
// count.
class CorpusPrior {
 public:
  void add(const std::string& surface, const ConceptId& cui, long count);
  long count(const std::string& surface, const ConceptId& cui) const;
  const std::map<std::string, std::map<ConceptId, long>>& table() const { return table_; }

  // The most frequent CUI among `cuis`; ties go to the smallest CUI.
  ConceptId resolve(const std::string& surface, const std::vector<ConceptId>& cuis) const;

 private:
  std::map<std::string, std::map<ConceptId, long>> table_;
};

// First corpus pass. A CUI's frequency is the number of raw (unfiltered)
// matches whose surface can link to it; each surface receives the
// frequencies of all its CUIs.
CorpusPrior build_prior(const std::vector<Document>& docs, const DictionaryMatcher& matcher);

std::vector<MentionCandidate> extract_candidates(const Document& doc,
                                                 const DictionaryMatcher& matcher,
                                                 const CorpusPrior& prior,
                                                 std::size_t window_tokens = 5);

// Context window of `window_tokens` alphanumeric tokens on each side of
// [m_start, m_end). Falls back to the text bounds when fewer tokens exist.
Span context_window(std::u32string_view text, std::size_t m_start, std::size_t m_end,
                    std::size_t window_tokens);

struct HeaderPattern {
  std::string pattern;
  std::string name;
};

struct TriggerConfig {
  std::vector<std::string> negation;
  std::vector<std::string> hypothetical;
  std::vector<std::string> experiencer;
  std::vector<HeaderPattern> section_headers;
  std::vector<std::string> family_history_sections{"Family_History"};

  static TriggerConfig defaults();
  static TriggerConfig load(const std::filesystem::path& path);
};

enum class FilterReason { kNone, kNegation, kHypothetical, kExperiencer };

class ContextFilter {
 public:
  ContextFilter() = default;
  explicit ContextFilter(const TriggerConfig& config);

  FilterReason classify(const MentionCandidate& candidate) const;
  std::vector<MentionCandidate> apply(const std::vector<MentionCandidate>& candidates) const;

 private:
  bool triggered(const Matcher& triggers, const MentionCandidate& candidate) const;

  Matcher negation_;
  Matcher hypothetical_;
  Matcher experiencer_;
  std::vector<std::string> family_sections_;
};

std::vector<MentionCandidate> apply_context_filters(
    const std::vector<MentionCandidate>& candidates, const TriggerConfig& config);

// Sections start at a header (matched case-insensitively at the start of a
// line) and run to the next header. Text before the first header is "basic".
std::vector<Section> split_sections(std::string_view text,
                                    const std::vector<HeaderPattern>& headers);

}  // namespace rarephen
