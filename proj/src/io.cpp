#include "rarephen/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rarephen/error.hpp"

namespace rarephen::io {

namespace {

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Calls fn(line_no, line) for every non-blank line.
template <class Fn>
void for_each_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line_no, line);
  }
}

template <class Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kParse, where(path, line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind() == ErrorKind::kInvalidArgument ? ErrorKind::kParse : e.kind(),
                  where(path, line_no) + ": " + e.what());
    }
  });
}

// Rows of a CSV file with a header; the header is validated against the
// expected leading column names.
template <class Fn>
void for_each_csv_row(const std::filesystem::path& path, const std::vector<std::string>& columns,
                      std::size_t required, Fn&& fn) {
  bool header = true;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    std::vector<std::string> fields = parse_csv_line(line);
    if (header) {
      header = false;
      for (std::size_t i = 0; i < required; ++i) {
        if (i >= fields.size() || fields[i] != columns[i]) {
          throw Error(ErrorKind::kParse, where(path, line_no) + ": expected header column '" +
                                             columns[i] + "'");
        }
      }
      return;
    }
    if (fields.size() < required || fields.size() > columns.size()) {
      throw Error(ErrorKind::kParse, where(path, line_no) + ": expected " +
                                         std::to_string(required) + ".." +
                                         std::to_string(columns.size()) + " columns");
    }
    fields.resize(columns.size());
    try {
      fn(fields);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kParse, where(path, line_no) + ": " + e.what());
    }
  });
}

bool parse_bool(const std::string& s) {
  if (s == "1" || s == "true" || s == "True" || s == "T") return true;
  if (s == "0" || s == "false" || s == "False" || s == "F") return false;
  throw Error(ErrorKind::kParse, "expected a boolean, got '" + s + "'");
}

std::size_t parse_index(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw Error(ErrorKind::kParse, "expected an integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

json concepts_to_json(const std::set<ConceptId>& concepts) {
  json out = json::array();
  for (const auto& c : concepts) out.push_back(c.code());
  return out;
}

std::set<ConceptId> ordo_from_json(const json& j) {
  std::set<ConceptId> out;
  for (const auto& c : j) out.insert(ConceptId::ordo(c.get<std::string>()));
  return out;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next == std::string_view::npos ? line.npos : next - pos));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::kParse, "unterminated quoted CSV field");
  out.push_back(std::move(field));
  return out;
}

std::vector<Document> read_corpus_jsonl(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  for_each_json_line(path, [&](const json& j) {
    Document d;
    d.doc_id = j.at("doc_id").get<std::string>();
    if (j.contains("admission_id") && !j.at("admission_id").is_null()) {
      d.admission_id = j.at("admission_id").get<std::string>();
    }
    d.text = j.at("text").get<std::string>();
    if (!ids.insert(d.doc_id).second) {
      throw Error(ErrorKind::kParse, "duplicate doc_id '" + d.doc_id + "'");
    }
    docs.push_back(std::move(d));
  });
  return docs;
}

json candidate_to_json(const MentionCandidate& c) {
  return {
      {"doc_id", c.doc_id},
      {"m_start", c.m_start},
      {"m_end", c.m_end},
      {"surface", c.surface},
      {"cui", c.cui.code()},
      {"context", c.context},
      {"window_span", {c.window.start, c.window.end}},
      {"structure_name", c.structure_name ? json(*c.structure_name) : json(nullptr)},
      {"mention_in_context", {c.mention_in_context.start, c.mention_in_context.end}},
  };
}

MentionCandidate candidate_from_json(const json& j) {
  MentionCandidate c;
  c.doc_id = j.at("doc_id").get<std::string>();
  c.m_start = j.at("m_start").get<std::size_t>();
  c.m_end = j.at("m_end").get<std::size_t>();
  c.surface = j.at("surface").get<std::string>();
  c.cui = ConceptId::umls(j.at("cui").get<std::string>());
  c.context = j.at("context").get<std::string>();
  c.window = {j.at("window_span").at(0).get<std::size_t>(),
              j.at("window_span").at(1).get<std::size_t>()};
  if (!j.at("structure_name").is_null()) c.structure_name = j.at("structure_name").get<std::string>();
  c.mention_in_context = {j.at("mention_in_context").at(0).get<std::size_t>(),
                          j.at("mention_in_context").at(1).get<std::size_t>()};
  if (c.m_start >= c.m_end || c.mention_in_context.start >= c.mention_in_context.end ||
      c.mention_in_context.length() != c.m_end - c.m_start) {
    throw Error(ErrorKind::kParse, "inconsistent candidate offsets");
  }
  return c;
}

void write_candidates_jsonl(const std::filesystem::path& path,
                            const std::vector<MentionCandidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    out += candidate_to_json(c).dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<MentionCandidate> read_candidates_jsonl(const std::filesystem::path& path) {
  std::vector<MentionCandidate> out;
  for_each_json_line(path, [&](const json& j) { out.push_back(candidate_from_json(j)); });
  return out;
}

json frequency_to_json(const FrequencyTable& freq) {
  json counts = json::object();
  for (const auto& [cui, n] : freq.counts) counts[cui.code()] = n;
  return {{"total", freq.total}, {"counts", counts}};
}

FrequencyTable frequency_from_json(const json& j) {
  FrequencyTable t;
  t.total = j.at("total").get<std::size_t>();
  for (const auto& [cui, n] : j.at("counts").items()) {
    t.counts[ConceptId::umls(cui)] = n.get<std::size_t>();
  }
  return t;
}

void write_weak_jsonl(const std::filesystem::path& path, const WeakDataset& weak) {
  std::string out;
  for (const auto& pair : weak.in_input_order()) {
    json j = candidate_to_json(pair.candidate);
    j["lambda1"] = pair.rules.lambda1;
    j["lambda2"] = pair.rules.lambda2;
    const auto y = pair.rules.y_weak();
    j["y_weak"] = y ? json(*y ? 1 : 0) : json(nullptr);
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

WeakDataset read_weak_jsonl(const std::filesystem::path& path, const WeakRuleParams& params) {
  WeakDataset weak;
  weak.params = params;
  std::size_t index = 0;
  for_each_json_line(path, [&](const json& j) {
    WeakLabeledPair pair{index++, candidate_from_json(j),
                         {j.at("lambda1").get<bool>(), j.at("lambda2").get<bool>()}};
    const auto expected = pair.rules.y_weak();
    const json& y = j.at("y_weak");
    if (y.is_null() != !expected.has_value() ||
        (expected && (y.get<int>() == 1) != *expected)) {
      throw Error(ErrorKind::kParse, "y_weak disagrees with lambda1/lambda2");
    }
    (pair.rules.selected() ? weak.labeled : weak.unlabeled).push_back(std::move(pair));
  });
  weak.total_links = index;
  return weak;
}

std::vector<GoldMentionLabel> read_gold_csv(const std::filesystem::path& path) {
  static const std::vector<std::string> columns{"doc_id", "m_start",   "m_end",     "cui",
                                                "label_umls", "ordo_id", "label_ordo"};
  std::vector<GoldMentionLabel> out;
  for_each_csv_row(path, columns, 5, [&](const std::vector<std::string>& f) {
    GoldMentionLabel g;
    g.key = {f[0], parse_index(f[1]), parse_index(f[2]), ConceptId::umls(f[3])};
    g.label_umls = parse_bool(f[4]);
    if (!f[5].empty()) g.ordo_id = ConceptId::ordo(f[5]);
    if (!f[6].empty()) g.label_ordo = parse_bool(f[6]);
    out.push_back(std::move(g));
  });
  return out;
}

std::map<std::string, std::vector<std::string>> read_icd_csv(const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::string>> out;
  for_each_csv_row(path, {"admission_id", "icd9_code"}, 2,
                   [&](const std::vector<std::string>& f) { out[f[0]].push_back(f[1]); });
  return out;
}

AdmissionLabels read_admission_labels_csv(const std::filesystem::path& path) {
  AdmissionLabels out;
  for_each_csv_row(path, {"admission_id", "ordo_id"}, 2, [&](const std::vector<std::string>& f) {
    auto& labels = out[f[0]];
    if (!f[1].empty()) labels.insert(ConceptId::ordo(f[1]));
  });
  return out;
}

std::vector<MatchJudgment> read_match_judgments(const std::filesystem::path& path) {
  std::vector<MatchJudgment> out;
  bool header = true;
  for_each_line(path, [&](std::size_t line_no, const std::string& line) {
    if (header) {
      header = false;
      return;
    }
    const auto f = split(line, '\t');
    if (f.size() != 3) throw Error(ErrorKind::kParse, where(path, line_no) + ": expected 3 columns");
    try {
      out.push_back({ConceptId::umls(f[0]), ConceptId::ordo(f[1]), parse_bool(f[2])});
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, where(path, line_no) + ": " + e.what());
    }
  });
  return out;
}

json evidence_to_json(const Evidence& e) {
  json j = candidate_to_json(e.candidate);
  j["probability"] = e.probability;
  j["confirmed"] = e.confirmed;
  j["ordo"] = concepts_to_json(e.ordo);
  j["mapped"] = e.mapped();
  return j;
}

Evidence evidence_from_json(const json& j) {
  Evidence e;
  e.candidate = candidate_from_json(j);
  e.probability = j.at("probability").get<double>();
  e.confirmed = j.at("confirmed").get<bool>();
  e.ordo = ordo_from_json(j.at("ordo"));
  return e;
}

void write_results_jsonl(const std::filesystem::path& path,
                         const std::vector<AdmissionResult>& results) {
  std::string out;
  for (const auto& r : results) {
    json evidence = json::array();
    for (const auto& e : r.evidence) evidence.push_back(evidence_to_json(e));
    const json j = {{"admission_id", r.admission_id},
                    {"ordo", concepts_to_json(r.ordo_set)},
                    {"evidence", evidence}};
    out += j.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<AdmissionResult> read_results_jsonl(const std::filesystem::path& path) {
  std::vector<AdmissionResult> out;
  for_each_json_line(path, [&](const json& j) {
    AdmissionResult r;
    r.admission_id = j.at("admission_id").get<std::string>();
    r.ordo_set = ordo_from_json(j.at("ordo"));
    for (const auto& e : j.at("evidence")) r.evidence.push_back(evidence_from_json(e));
    out.push_back(std::move(r));
  });
  return out;
}

json metrics_to_json(const MetricsReport& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"n_pos", m.n_pos},
          {"n_total", m.n_total}};
}

}  // namespace rarephen::io
