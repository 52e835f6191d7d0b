#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "rarephen/ontology.hpp"

namespace rarephen::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(RAREPHEN_FIXTURES) / name;
}

inline OntologyPaths fixture_ontology() {
  return {fixture("ordo_umls.tsv"), fixture("ordo_icd10.tsv"), fixture("icd9_icd10.tsv"),
          fixture("icd9_umls.tsv"), fixture("ordo_meta.tsv")};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rarephen-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace rarephen::testing
