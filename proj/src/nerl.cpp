#include "rarephen/nerl.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <set>

#include "rarephen/error.hpp"
#include "rarephen/text.hpp"
#include "table_reader.hpp"

namespace rarephen {

namespace {

std::vector<text::Token> alnum_tokens(std::u32string_view text) {
  std::vector<text::Token> tokens = text::tokenize(text);
  std::erase_if(tokens, [](const text::Token& t) { return !t.alnum; });
  return tokens;
}

Span window_from_tokens(const std::vector<text::Token>& words, std::size_t text_length,
                        std::size_t m_start, std::size_t m_end, std::size_t k) {
  // words ending at or before the mention / starting at or after it
  auto before_end = std::partition_point(words.begin(), words.end(),
                                         [&](const text::Token& t) { return t.end <= m_start; });
  auto after_begin = std::partition_point(words.begin(), words.end(),
                                          [&](const text::Token& t) { return t.start < m_end; });
  Span window{m_start, m_end};
  if (k == 0) return window;
  const auto n_before = static_cast<std::size_t>(before_end - words.begin());
  window.start = n_before >= k ? (before_end - k)->start : 0;
  const auto n_after = static_cast<std::size_t>(words.end() - after_begin);
  window.end = n_after >= k ? (after_begin + (k - 1))->end : text_length;
  return window;
}

std::vector<std::string> yaml_strings(const YAML::Node& node, const std::string& key) {
  std::vector<std::string> out;
  const YAML::Node list = node[key];
  if (!list) return out;
  if (!list.IsSequence()) {
    throw Error(ErrorKind::kParse, "trigger config key '" + key + "' must be a list");
  }
  for (const auto& item : list) out.push_back(item.as<std::string>());
  return out;
}

}  // namespace

std::vector<SynonymEntry> build_dictionary(const OntologyStore& store,
                                           const std::vector<SynonymEntry>& rows) {
  std::set<SynonymEntry> kept;
  for (const auto& row : rows) {
    if (!store.is_rare_umls(row.cui)) continue;
    std::string surface = text::normalize_utf8(row.surface);
    if (surface.empty()) {
      throw Error(ErrorKind::kParse, "synonym for " + row.cui.code() + " is empty");
    }
    kept.insert({std::move(surface), row.cui});
  }
  if (kept.empty()) {
    throw Error(ErrorKind::kEmptyInput, "no synonym links to a rare-disease UMLS concept");
  }
  return {kept.begin(), kept.end()};
}

std::vector<SynonymEntry> read_synonyms(const std::filesystem::path& synonym_file) {
  std::vector<SynonymEntry> rows;
  for (const auto& row : detail::read_tsv(synonym_file, 2)) {
    if (!ConceptId::valid(Scheme::kUmls, row.fields[1])) {
      throw Error(ErrorKind::kParse, detail::where(synonym_file, row.line) +
                                         ": malformed UMLS code '" + row.fields[1] + "'");
    }
    if (text::normalize_utf8(row.fields[0]).empty()) {
      throw Error(ErrorKind::kParse, detail::where(synonym_file, row.line) + ": empty surface");
    }
    rows.push_back({row.fields[0], ConceptId::umls(row.fields[1])});
  }
  return rows;
}

std::vector<SynonymEntry> build_dictionary(const OntologyStore& store,
                                           const std::filesystem::path& synonym_file) {
  return build_dictionary(store, read_synonyms(synonym_file));
}

DictionaryMatcher::DictionaryMatcher(const std::vector<SynonymEntry>& dictionary) {
  if (dictionary.empty()) throw Error(ErrorKind::kEmptyInput, "empty dictionary");
  std::map<std::string, std::set<ConceptId>> grouped;
  for (const auto& e : dictionary) grouped[text::normalize_utf8(e.surface)].insert(e.cui);
  for (auto& [surface, cuis] : grouped) {
    surfaces_.push_back(surface);
    cuis_.emplace_back(cuis.begin(), cuis.end());
  }
  matcher_ = Matcher(surfaces_);
}

DictionaryMatcher build_matcher(const std::vector<SynonymEntry>& dictionary) {
  return DictionaryMatcher(dictionary);
}

void CorpusPrior::add(const std::string& surface, const ConceptId& cui, long count) {
  table_[surface][cui] += count;
}

long CorpusPrior::count(const std::string& surface, const ConceptId& cui) const {
  auto it = table_.find(surface);
  if (it == table_.end()) return 0;
  auto jt = it->second.find(cui);
  return jt == it->second.end() ? 0 : jt->second;
}

ConceptId CorpusPrior::resolve(const std::string& surface,
                               const std::vector<ConceptId>& cuis) const {
  if (cuis.empty()) throw Error(ErrorKind::kInvalidArgument, "no CUI to resolve for " + surface);
  const ConceptId* best = &cuis.front();
  long best_count = count(surface, *best);
  for (const auto& cui : cuis) {
    const long c = count(surface, cui);
    if (c > best_count || (c == best_count && cui < *best)) {
      best = &cui;
      best_count = c;
    }
  }
  return *best;
}

CorpusPrior build_prior(const std::vector<Document>& docs, const DictionaryMatcher& matcher) {
  std::map<ConceptId, long> freq;
  for (const auto& doc : docs) {
    for (const Match& m : matcher.matcher().find(text::decode_utf8(doc.text))) {
      for (const auto& cui : matcher.cuis(m.pattern)) ++freq[cui];
    }
  }
  CorpusPrior prior;
  for (std::size_t p = 0; p < matcher.matcher().size(); ++p) {
    const auto& cuis = matcher.cuis(p);
    if (cuis.size() < 2) continue;
    for (const auto& cui : cuis) {
      auto it = freq.find(cui);
      if (it != freq.end()) prior.add(matcher.surface(p), cui, it->second);
    }
  }
  return prior;
}

Span context_window(std::u32string_view text, std::size_t m_start, std::size_t m_end,
                    std::size_t window_tokens) {
  return window_from_tokens(alnum_tokens(text), text.size(), m_start, m_end, window_tokens);
}

std::vector<MentionCandidate> extract_candidates(const Document& doc,
                                                 const DictionaryMatcher& matcher,
                                                 const CorpusPrior& prior,
                                                 std::size_t window_tokens) {
  const std::u32string text = text::decode_utf8(doc.text);
  const std::vector<text::Token> words = alnum_tokens(text);

  std::vector<MentionCandidate> out;
  for (const Match& m : matcher.matcher().find(text)) {
    MentionCandidate c;
    c.doc_id = doc.doc_id;
    c.m_start = m.start;
    c.m_end = m.end;
    c.surface = text::slice_utf8(text, m.start, m.end);
    c.cui = prior.resolve(matcher.surface(m.pattern), matcher.cuis(m.pattern));
    c.window = window_from_tokens(words, text.size(), m.start, m.end, window_tokens);
    c.context = text::slice_utf8(text, c.window.start, c.window.end);
    c.mention_in_context = {m.start - c.window.start, m.end - c.window.start};
    for (const auto& s : doc.sections) {
      if (s.start <= m.start && m.start < s.end) {
        c.structure_name = s.name;
        break;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

TriggerConfig TriggerConfig::defaults() {
  TriggerConfig c;
  c.negation = {"no evidence of", "negative for", "negative", "denies", "denied",
                "no signs of",    "free of",      "ruled out", "without"};
  c.hypothetical = {"concern of", "concern for", "rule out", "r/o",
                    "suggesting", "suspicion of", "possible", "risk of"};
  c.experiencer = {"mother",      "father",      "family history", "sister", "brother",
                   "grandmother", "grandfather", "aunt",           "uncle"};
  c.section_headers = {
      {"Chief Complaint:", "Chief_Complaint"},
      {"History of Present Illness:", "History_of_Present_Illness"},
      {"Past Medical History:", "History_of_Past_Illness"},
      {"Social History:", "Social_History"},
      {"Family History:", "Family_History"},
      {"Physical Exam:", "Physical_Exam"},
      {"Pertinent Results:", "Pertinent_Results"},
      {"Brief Hospital Course:", "Hospital_course"},
      {"Hospital Course:", "Hospital_course"},
      {"Discharge Medications:", "Discharge_Medications"},
      {"Discharge Diagnosis:", "Discharge_Diagnosis"},
      {"Discharge Diagnoses:", "Discharge_Diagnosis"},
      {"Findings:", "Findings"},
      {"Impression:", "Impression"},
  };
  return c;
}

TriggerConfig TriggerConfig::load(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::kIo, "cannot open trigger config " + path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  TriggerConfig c;
  try {
    c.negation = yaml_strings(root, "negation");
    c.hypothetical = yaml_strings(root, "hypothetical");
    c.experiencer = yaml_strings(root, "experiencer");
    if (root["family_history_sections"]) {
      c.family_history_sections = yaml_strings(root, "family_history_sections");
    }
    if (const YAML::Node headers = root["section_headers"]) {
      for (const auto& h : headers) {
        c.section_headers.push_back({h["pattern"].as<std::string>(), h["name"].as<std::string>()});
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return c;
}

ContextFilter::ContextFilter(const TriggerConfig& config)
    : negation_(config.negation),
      hypothetical_(config.hypothetical),
      experiencer_(config.experiencer),
      family_sections_(config.family_history_sections) {}

bool ContextFilter::triggered(const Matcher& triggers, const MentionCandidate& c) const {
  if (triggers.empty()) return false;
  const std::u32string context = text::decode_utf8(c.context);
  for (const Match& m : triggers.find_all(context)) {
    if (m.end <= c.mention_in_context.start || m.start >= c.mention_in_context.end) return true;
  }
  return false;
}

FilterReason ContextFilter::classify(const MentionCandidate& c) const {
  if (triggered(negation_, c)) return FilterReason::kNegation;
  if (triggered(hypothetical_, c)) return FilterReason::kHypothetical;
  if (c.structure_name &&
      std::find(family_sections_.begin(), family_sections_.end(), *c.structure_name) !=
          family_sections_.end()) {
    return FilterReason::kExperiencer;
  }
  if (triggered(experiencer_, c)) return FilterReason::kExperiencer;
  return FilterReason::kNone;
}

std::vector<MentionCandidate> ContextFilter::apply(
    const std::vector<MentionCandidate>& candidates) const {
  std::vector<MentionCandidate> kept;
  for (const auto& c : candidates) {
    if (classify(c) == FilterReason::kNone) kept.push_back(c);
  }
  return kept;
}

std::vector<MentionCandidate> apply_context_filters(
    const std::vector<MentionCandidate>& candidates, const TriggerConfig& config) {
  return ContextFilter(config).apply(candidates);
}

std::vector<Section> split_sections(std::string_view utf8,
                                    const std::vector<HeaderPattern>& headers) {
  const std::u32string text = text::decode_utf8(utf8);
  std::vector<std::pair<std::u32string, const HeaderPattern*>> patterns;
  for (const auto& h : headers) {
    std::u32string p = text::normalize(text::decode_utf8(h.pattern));
    if (!p.empty()) patterns.emplace_back(std::move(p), &h);
  }

  auto header_at = [&](std::size_t pos) -> const HeaderPattern* {
    for (const auto& [p, header] : patterns) {
      if (pos + p.size() > text.size()) continue;
      bool ok = true;
      for (std::size_t i = 0; i < p.size() && ok; ++i) {
        const char32_t c = text[pos + i];
        ok = p[i] == U' ' ? text::is_space(c) : text::fold(c) == p[i];
      }
      if (ok) return header;
    }
    return nullptr;
  };

  std::vector<std::pair<std::size_t, const HeaderPattern*>> hits;
  for (std::size_t line = 0; line < text.size();) {
    std::size_t pos = line;
    while (pos < text.size() && (text[pos] == U' ' || text[pos] == U'\t')) ++pos;
    if (const HeaderPattern* h = header_at(pos)) hits.emplace_back(pos, h);
    const std::size_t nl = text.find(U'\n', line);
    if (nl == std::u32string::npos) break;
    line = nl + 1;
  }

  std::vector<Section> sections;
  const std::size_t first = hits.empty() ? text.size() : hits.front().first;
  if (first > 0) sections.push_back({"basic", 0, first});
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const std::size_t end = i + 1 < hits.size() ? hits[i + 1].first : text.size();
    sections.push_back({hits[i].second->name, hits[i].first, end});
  }
  return sections;
}

}  // namespace rarephen
