#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rarephen {

enum class Scheme { kUmls, kOrdo, kIcd10, kIcd9 };

std::string_view to_string(Scheme scheme);

// A concept code tagged with its terminology. Construction validates the
// code format for the scheme.
class ConceptId {
 public:
  ConceptId() = default;
  ConceptId(Scheme scheme, std::string code);

  static ConceptId umls(std::string code) { return {Scheme::kUmls, std::move(code)}; }
  static ConceptId ordo(std::string code) { return {Scheme::kOrdo, std::move(code)}; }
  static ConceptId icd10(std::string code) { return {Scheme::kIcd10, std::move(code)}; }
  static ConceptId icd9(std::string code) { return {Scheme::kIcd9, std::move(code)}; }

  static bool valid(Scheme scheme, std::string_view code);

  Scheme scheme() const { return scheme_; }
  const std::string& code() const { return code_; }

  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
  friend bool operator==(const ConceptId&, const ConceptId&) = default;

 private:
  Scheme scheme_ = Scheme::kUmls;
  std::string code_;
};

// Ontology matching relation, read from ORDO cross references.
enum class Relation {
  kExact,              // E
  kBroaderToNarrower,  // BTNT: the ORDO term is broader than the other term
  kNarrowerToBroader,  // NTBT
};

std::string_view to_string(Relation relation);
Relation parse_relation(std::string_view token);

struct MappingTriple {
  ConceptId source;
  ConceptId target;
  Relation relation = Relation::kExact;

  friend auto operator<=>(const MappingTriple&, const MappingTriple&) = default;
  friend bool operator==(const MappingTriple&, const MappingTriple&) = default;
};

struct OrdoMeta {
  ConceptId ordo_id;
  std::string preferred_label;
  bool is_group_of_disorders = false;
};

struct OntologyPaths {
  std::filesystem::path ordo_umls;
  std::filesystem::path ordo_icd10;
  std::filesystem::path icd9_icd10;
  std::filesystem::path icd9_umls;
  std::filesystem::path ordo_meta;
};

// Raw table contents, as read from disk or assembled in memory.
struct OntologyTables {
  std::vector<MappingTriple> ordo_umls;
  std::vector<MappingTriple> ordo_icd10;
  std::vector<std::pair<ConceptId, ConceptId>> icd9_icd10;
  std::vector<std::pair<ConceptId, ConceptId>> icd9_umls;
  std::vector<OrdoMeta> ordo_meta;
};

OntologyTables read_ontology_tables(const OntologyPaths& paths);

// Immutable view over the loaded mapping tables. Every query is a pure
// function of the tables, so a store can be shared freely between threads.
//
// Only E and BTNT triples are used for phenotyping, and an ORDO concept
// flagged as a group of disorders never appears in any result.
class OntologyStore {
 public:
  OntologyStore() = default;
  explicit OntologyStore(OntologyTables tables);

  static OntologyStore load(const OntologyPaths& paths);

  const std::set<MappingTriple>& ordo_umls() const { return ordo_umls_; }
  const std::set<MappingTriple>& ordo_icd10() const { return ordo_icd10_; }

  std::set<ConceptId> rare_umls_set() const { return rare_umls_; }
  bool is_rare_umls(const ConceptId& cui) const { return rare_umls_.contains(cui); }

  std::set<ConceptId> umls_to_ordo(const ConceptId& cui) const;
  std::set<ConceptId> icd9_to_ordo(const ConceptId& code) const;

  bool is_group_of_disorders(const ConceptId& ordo) const;
  const OrdoMeta* meta(const ConceptId& ordo) const;

 private:
  bool usable(const MappingTriple& triple) const;

  std::set<MappingTriple> ordo_umls_;
  std::set<MappingTriple> ordo_icd10_;
  std::multimap<ConceptId, ConceptId> icd9_icd10_;
  std::multimap<ConceptId, ConceptId> icd9_umls_;
  std::map<ConceptId, OrdoMeta> ordo_meta_;

  std::set<ConceptId> rare_umls_;
  std::multimap<ConceptId, ConceptId> umls_index_;   // UMLS -> ORDO (filtered)
  std::multimap<ConceptId, ConceptId> icd10_index_;  // ICD-10 -> ORDO (filtered)
};

}  // namespace rarephen
