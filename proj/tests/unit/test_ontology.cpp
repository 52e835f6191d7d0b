#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "rarephen/error.hpp"
#include "rarephen/ontology.hpp"

using namespace rarephen;
using namespace rarephen::testing;

namespace {

OntologyStore fixture_store() { return OntologyStore::load(fixture_ontology()); }

std::set<ConceptId> ordo(std::initializer_list<const char*> codes) {
  std::set<ConceptId> s;
  for (const char* c : codes) s.insert(ConceptId::ordo(c));
  return s;
}

void write(const std::filesystem::path& p, const std::string& body) { std::ofstream(p) << body; }

}  // namespace

TEST_CASE("concept codes are validated per scheme") {
  CHECK(ConceptId::valid(Scheme::kUmls, "C0272285"));
  CHECK_FALSE(ConceptId::valid(Scheme::kUmls, "C027228"));
  CHECK_FALSE(ConceptId::valid(Scheme::kUmls, "c0272285"));
  CHECK(ConceptId::valid(Scheme::kOrdo, "Orphanet_3325"));
  CHECK_FALSE(ConceptId::valid(Scheme::kOrdo, "Orphanet_"));
  CHECK_FALSE(ConceptId::valid(Scheme::kOrdo, "orphanet_3325"));
  CHECK(ConceptId::valid(Scheme::kIcd10, "I011"));
  CHECK(ConceptId::valid(Scheme::kIcd10, "P77"));
  CHECK(ConceptId::valid(Scheme::kIcd9, "3911"));
  CHECK(ConceptId::valid(Scheme::kIcd9, "0463"));
  CHECK(ConceptId::valid(Scheme::kIcd9, "V125"));
  CHECK_FALSE(ConceptId::valid(Scheme::kIcd9, "046.3"));
  CHECK_THROWS_AS(ConceptId::umls("X1"), Error);
}

TEST_CASE("equality is exact on scheme and code") {
  CHECK(ConceptId::umls("C0272285") == ConceptId::umls("C0272285"));
  CHECK(ConceptId::icd9("390") != ConceptId::icd9("3900"));
}

TEST_CASE("triple rows load with their relation") {
  const auto tables = read_ontology_tables(fixture_ontology());
  const MappingTriple hit{ConceptId::ordo("Orphanet_3325"), ConceptId::umls("C0272285"),
                          Relation::kExact};
  CHECK(std::find(tables.ordo_umls.begin(), tables.ordo_umls.end(), hit) != tables.ordo_umls.end());
}

TEST_CASE("rare set keeps E/BTNT and drops NTBT and groups") {
  SUBCASE("exact") {
    OntologyStore s({{{ConceptId::ordo("Orphanet_3325"), ConceptId::umls("C0272285"),
                       Relation::kExact}}});
    CHECK(s.rare_umls_set() == std::set{ConceptId::umls("C0272285")});
  }
  SUBCASE("narrower-to-broader") {
    OntologyStore s({{{ConceptId::ordo("Orphanet_1"), ConceptId::umls("C0000001"),
                       Relation::kNarrowerToBroader}}});
    CHECK(s.rare_umls_set().empty());
  }
  SUBCASE("group of disorders") {
    OntologyTables t;
    t.ordo_umls = {{ConceptId::ordo("Orphanet_181422"), ConceptId::umls("C0020473"), Relation::kExact}};
    t.ordo_meta = {{ConceptId::ordo("Orphanet_181422"), "Rare hyperlipidemia", true}};
    CHECK(OntologyStore(t).rare_umls_set().empty());
  }
}

TEST_CASE("umls_to_ordo on the mapping fixture") {
  const auto s = fixture_store();
  CHECK(s.umls_to_ordo(ConceptId::umls("C0272285")) == ordo({"Orphanet_3325"}));
  CHECK(s.umls_to_ordo(ConceptId::umls("C0035436")) == ordo({"Orphanet_3099"}));
  CHECK(s.umls_to_ordo(ConceptId::umls("C0020473")).empty());
  CHECK(s.umls_to_ordo(ConceptId::umls("C0014544")).empty());
  CHECK(s.umls_to_ordo(ConceptId::umls("C0242339")).empty());
  CHECK(s.umls_to_ordo(ConceptId::umls("C9999999")).empty());
  CHECK_THROWS_AS(s.umls_to_ordo(ConceptId::ordo("Orphanet_3325")), Error);
}

TEST_CASE("icd9_to_ordo follows both paths") {
  const auto s = fixture_store();
  CHECK(s.icd9_to_ordo(ConceptId::icd9("0463")) == ordo({"Orphanet_217260"}));
  CHECK(s.icd9_to_ordo(ConceptId::icd9("3911")) == ordo({"Orphanet_3099"}));
  for (const char* code : {"390", "3910", "3912", "3918", "3919"}) {
    CHECK(s.icd9_to_ordo(ConceptId::icd9(code)) == ordo({"Orphanet_3099"}));
  }
  CHECK(s.icd9_to_ordo(ConceptId::icd9("7775")) == ordo({"Orphanet_391673"}));
  // ICD-10 link is narrower-to-broader; only the UMLS path reaches ORDO
  CHECK(s.icd9_to_ordo(ConceptId::icd9("33520")) == ordo({"Orphanet_803"}));
  CHECK(s.icd9_to_ordo(ConceptId::icd9("501")) == ordo({"Orphanet_2302"}));
  CHECK(s.icd9_to_ordo(ConceptId::icd9("4019")).empty());
  CHECK_THROWS_AS(s.icd9_to_ordo(ConceptId::umls("C0023524")), Error);
}

TEST_CASE("narrower-to-broader ICD-10 links never reach ORDO") {
  OntologyTables t;
  t.ordo_icd10 = {{ConceptId::ordo("Orphanet_803"), ConceptId::icd10("G122"),
                   Relation::kNarrowerToBroader}};
  t.icd9_icd10 = {{ConceptId::icd9("3352"), ConceptId::icd10("G122")}};
  CHECK(OntologyStore(t).icd9_to_ordo(ConceptId::icd9("3352")).empty());
}

TEST_CASE("group filter applies to broader-to-narrower links too") {
  OntologyTables t;
  t.ordo_icd10 = {{ConceptId::ordo("Orphanet_101998"), ConceptId::icd10("G40"),
                   Relation::kBroaderToNarrower}};
  t.icd9_icd10 = {{ConceptId::icd9("345"), ConceptId::icd10("G40")}};
  t.ordo_meta = {{ConceptId::ordo("Orphanet_101998"), "Rare epilepsy", true}};
  CHECK(OntologyStore(t).icd9_to_ordo(ConceptId::icd9("345")).empty());
}

TEST_CASE("load errors carry file and line") {
  TempDir dir("onto");
  auto paths = fixture_ontology();
  paths.ordo_umls = dir / "bad.tsv";
  write(paths.ordo_umls, "ordo_id\tumls_id\trelation\nOrphanet_1\tC0000001\tE\nOrphanet_2\tC0000002\tXX\n");
  try {
    OntologyStore::load(paths);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find("bad.tsv:3") != std::string::npos);
  }
  write(paths.ordo_umls, "ordo_id\tumls_id\trelation\nOrphanet_1\tC01\tE\n");
  CHECK_THROWS_AS(OntologyStore::load(paths), Error);
  write(paths.ordo_umls, "ordo_id\tumls_id\trelation\nOrphanet_1\tC0000001\n");
  CHECK_THROWS_AS(OntologyStore::load(paths), Error);
}

TEST_CASE("empty mapping files give an empty store") {
  TempDir dir("onto-empty");
  OntologyPaths p{dir / "a.tsv", dir / "b.tsv", dir / "c.tsv", dir / "d.tsv", dir / "e.tsv"};
  write(p.ordo_umls, "ordo_id\tumls_id\trelation\n");
  write(p.ordo_icd10, "ordo_id\ticd10_id\trelation\n");
  write(p.icd9_icd10, "icd9\ticd10\n");
  write(p.icd9_umls, "icd9\tumls\n");
  write(p.ordo_meta, "ordo_id\tpreferred_label\tis_group_of_disorders\n");
  const auto s = OntologyStore::load(p);
  CHECK(s.rare_umls_set().empty());
  CHECK(s.ordo_umls().empty());
  CHECK(s.umls_to_ordo(ConceptId::umls("C0272285")).empty());
  CHECK(s.icd9_to_ordo(ConceptId::icd9("0463")).empty());
}

TEST_CASE("duplicated rows collapse to one triple") {
  const MappingTriple t{ConceptId::ordo("Orphanet_3325"), ConceptId::umls("C0272285"),
                        Relation::kExact};
  OntologyStore s({{t, t}});
  CHECK(s.ordo_umls().size() == 1);
}

TEST_CASE("property: store invariants hold on the fixture") {
  const auto s = fixture_store();
  const auto rare = s.rare_umls_set();
  std::set<ConceptId> targets;
  std::set<ConceptId> ordo_ids;
  for (const auto& t : s.ordo_umls()) {
    targets.insert(t.target);
    ordo_ids.insert(t.source);
  }
  for (const auto& t : s.ordo_icd10()) ordo_ids.insert(t.source);
  for (const auto& c : rare) CHECK(targets.contains(c));

  // a CUI whose every link is NTBT or a group never enters the rare set
  for (const auto& cui : targets) {
    bool usable = false;
    for (const auto& t : s.ordo_umls()) {
      if (t.target == cui && t.relation != Relation::kNarrowerToBroader &&
          !s.is_group_of_disorders(t.source)) {
        usable = true;
      }
    }
    CHECK(rare.contains(cui) == usable);
  }
  // round trip for exact, non-group triples; results stay inside the store
  for (const auto& t : s.ordo_umls()) {
    const auto out = s.umls_to_ordo(t.target);
    for (const auto& o : out) {
      CHECK(ordo_ids.contains(o));
      CHECK_FALSE(s.is_group_of_disorders(o));
    }
    if (t.relation == Relation::kExact && !s.is_group_of_disorders(t.source)) {
      CHECK(out.contains(t.source));
    }
  }
  // a second load answers every lookup identically
  const auto again = fixture_store();
  for (const auto& cui : targets) CHECK(again.umls_to_ordo(cui) == s.umls_to_ordo(cui));
  for (const char* code : {"0463", "3911", "390", "7775", "33520", "501", "4019"}) {
    const auto c = ConceptId::icd9(code);
    CHECK(again.icd9_to_ordo(c) == s.icd9_to_ordo(c));
    for (const auto& o : s.icd9_to_ordo(c)) CHECK_FALSE(s.is_group_of_disorders(o));
  }
}
