#include "rarephen/ontology.hpp"

#include <algorithm>

#include "rarephen/error.hpp"
#include "table_reader.hpp"

namespace rarephen {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool upper_or_digit(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

ConceptId parse_code(Scheme scheme, const std::string& code, const std::filesystem::path& path,
                     std::size_t line) {
  if (!ConceptId::valid(scheme, code)) {
    throw Error(ErrorKind::kParse, detail::where(path, line) + ": malformed " +
                                       std::string(to_string(scheme)) + " code '" + code + "'");
  }
  return ConceptId(scheme, code);
}

std::vector<MappingTriple> read_triples(const std::filesystem::path& path, Scheme other) {
  std::vector<MappingTriple> triples;
  for (const auto& row : detail::read_tsv(path, 3)) {
    Relation relation;
    try {
      relation = parse_relation(row.fields[2]);
    } catch (const Error& e) {
      throw Error(ErrorKind::kParse, detail::where(path, row.line) + ": " + e.what());
    }
    triples.push_back({parse_code(Scheme::kOrdo, row.fields[0], path, row.line),
                       parse_code(other, row.fields[1], path, row.line), relation});
  }
  return triples;
}

std::vector<std::pair<ConceptId, ConceptId>> read_pairs(const std::filesystem::path& path,
                                                        Scheme target) {
  std::vector<std::pair<ConceptId, ConceptId>> pairs;
  for (const auto& row : detail::read_tsv(path, 2)) {
    pairs.emplace_back(parse_code(Scheme::kIcd9, row.fields[0], path, row.line),
                       parse_code(target, row.fields[1], path, row.line));
  }
  return pairs;
}

std::vector<OrdoMeta> read_meta(const std::filesystem::path& path) {
  std::vector<OrdoMeta> meta;
  for (const auto& row : detail::read_tsv(path, 3)) {
    const std::string& flag = row.fields[2];
    if (flag != "0" && flag != "1") {
      throw Error(ErrorKind::kParse, detail::where(path, row.line) +
                                         ": is_group_of_disorders must be 0 or 1, got '" + flag +
                                         "'");
    }
    meta.push_back({parse_code(Scheme::kOrdo, row.fields[0], path, row.line), row.fields[1],
                    flag == "1"});
  }
  return meta;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kUmls: return "UMLS";
    case Scheme::kOrdo: return "ORDO";
    case Scheme::kIcd10: return "ICD10";
    case Scheme::kIcd9: return "ICD9";
  }
  return "?";
}

ConceptId::ConceptId(Scheme scheme, std::string code) : scheme_(scheme), code_(std::move(code)) {
  if (!valid(scheme_, code_)) {
    throw Error(ErrorKind::kInvalidArgument,
                "malformed " + std::string(to_string(scheme_)) + " code '" + code_ + "'");
  }
}

bool ConceptId::valid(Scheme scheme, std::string_view code) {
  switch (scheme) {
    case Scheme::kUmls:
      return code.size() == 8 && code[0] == 'C' && all_digits(code.substr(1));
    case Scheme::kOrdo:
      return code.starts_with("Orphanet_") && all_digits(code.substr(9));
    case Scheme::kIcd10:
      return code.size() >= 2 && code.size() <= 7 && code[0] >= 'A' && code[0] <= 'Z' &&
             code[1] >= '0' && code[1] <= '9' &&
             std::all_of(code.begin() + 2, code.end(), upper_or_digit);
    case Scheme::kIcd9:
      return !code.empty() && code.size() <= 5 &&
             (code[0] == 'E' || code[0] == 'V' || (code[0] >= '0' && code[0] <= '9')) &&
             (code.size() == 1 || all_digits(code.substr(1)));
  }
  return false;
}

std::string_view to_string(Relation relation) {
  switch (relation) {
    case Relation::kExact: return "E";
    case Relation::kBroaderToNarrower: return "BTNT";
    case Relation::kNarrowerToBroader: return "NTBT";
  }
  return "?";
}

Relation parse_relation(std::string_view token) {
  if (token == "E") return Relation::kExact;
  if (token == "BTNT") return Relation::kBroaderToNarrower;
  if (token == "NTBT") return Relation::kNarrowerToBroader;
  throw Error(ErrorKind::kParse, "unknown relation '" + std::string(token) + "'");
}

OntologyTables read_ontology_tables(const OntologyPaths& paths) {
  OntologyTables tables;
  tables.ordo_umls = read_triples(paths.ordo_umls, Scheme::kUmls);
  tables.ordo_icd10 = read_triples(paths.ordo_icd10, Scheme::kIcd10);
  tables.icd9_icd10 = read_pairs(paths.icd9_icd10, Scheme::kIcd10);
  tables.icd9_umls = read_pairs(paths.icd9_umls, Scheme::kUmls);
  tables.ordo_meta = read_meta(paths.ordo_meta);
  return tables;
}

OntologyStore OntologyStore::load(const OntologyPaths& paths) {
  return OntologyStore(read_ontology_tables(paths));
}

OntologyStore::OntologyStore(OntologyTables tables) {
  for (auto& t : tables.ordo_umls) {
    if (t.source.scheme() != Scheme::kOrdo || t.target.scheme() != Scheme::kUmls) {
      throw Error(ErrorKind::kInvalidArgument, "ORDO-UMLS triple with wrong schemes");
    }
    ordo_umls_.insert(std::move(t));
  }
  for (auto& t : tables.ordo_icd10) {
    if (t.source.scheme() != Scheme::kOrdo || t.target.scheme() != Scheme::kIcd10) {
      throw Error(ErrorKind::kInvalidArgument, "ORDO-ICD10 triple with wrong schemes");
    }
    ordo_icd10_.insert(std::move(t));
  }
  // Pairs are deduplicated through a set before indexing.
  std::set<std::pair<ConceptId, ConceptId>> icd9_icd10(tables.icd9_icd10.begin(),
                                                       tables.icd9_icd10.end());
  std::set<std::pair<ConceptId, ConceptId>> icd9_umls(tables.icd9_umls.begin(),
                                                      tables.icd9_umls.end());
  for (const auto& [k, v] : icd9_icd10) icd9_icd10_.emplace(k, v);
  for (const auto& [k, v] : icd9_umls) icd9_umls_.emplace(k, v);
  for (auto& m : tables.ordo_meta) ordo_meta_.insert_or_assign(m.ordo_id, std::move(m));

  for (const auto& t : ordo_umls_) {
    if (!usable(t)) continue;
    rare_umls_.insert(t.target);
    umls_index_.emplace(t.target, t.source);
  }
  for (const auto& t : ordo_icd10_) {
    if (usable(t)) icd10_index_.emplace(t.target, t.source);
  }
}

bool OntologyStore::usable(const MappingTriple& triple) const {
  // The group-of-disorders filter applies to every triple, BTNT included.
  return triple.relation != Relation::kNarrowerToBroader && !is_group_of_disorders(triple.source);
}

std::set<ConceptId> OntologyStore::umls_to_ordo(const ConceptId& cui) const {
  if (cui.scheme() != Scheme::kUmls) {
    throw Error(ErrorKind::kInvalidArgument, "umls_to_ordo expects a UMLS CUI, got " +
                                                 std::string(to_string(cui.scheme())));
  }
  std::set<ConceptId> out;
  auto [lo, hi] = umls_index_.equal_range(cui);
  for (auto it = lo; it != hi; ++it) out.insert(it->second);
  return out;
}

std::set<ConceptId> OntologyStore::icd9_to_ordo(const ConceptId& code) const {
  if (code.scheme() != Scheme::kIcd9) {
    throw Error(ErrorKind::kInvalidArgument, "icd9_to_ordo expects an ICD-9 code, got " +
                                                 std::string(to_string(code.scheme())));
  }
  std::set<ConceptId> out;
  auto [lo10, hi10] = icd9_icd10_.equal_range(code);
  for (auto it = lo10; it != hi10; ++it) {
    auto [lo, hi] = icd10_index_.equal_range(it->second);
    for (auto jt = lo; jt != hi; ++jt) out.insert(jt->second);
  }
  auto [lou, hiu] = icd9_umls_.equal_range(code);
  for (auto it = lou; it != hiu; ++it) out.merge(umls_to_ordo(it->second));
  return out;
}

bool OntologyStore::is_group_of_disorders(const ConceptId& ordo) const {
  const OrdoMeta* m = meta(ordo);
  return m != nullptr && m->is_group_of_disorders;
}

const OrdoMeta* OntologyStore::meta(const ConceptId& ordo) const {
  auto it = ordo_meta_.find(ordo);
  return it == ordo_meta_.end() ? nullptr : &it->second;
}

}  // namespace rarephen
