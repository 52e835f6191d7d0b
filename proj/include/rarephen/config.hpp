#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "rarephen/model.hpp"
#include "rarephen/ontology.hpp"
#include "rarephen/represent.hpp"
#include "rarephen/weaklabel.hpp"

namespace rarephen {

enum class ProviderKind { kBaseline, kRemote };

// Which link list the prevalence rule counts over.
enum class FrequencyScope { kPostFilter, kPreFilter };

struct PipelineConfig {
  std::filesystem::path corpus;
  OntologyPaths ontology;
  std::filesystem::path synonyms;
  std::optional<std::filesystem::path> triggers;

  WeakRuleParams rules;
  FrequencyScope frequency_scope = FrequencyScope::kPostFilter;
  EncodingOptions encoding;

  ProviderKind provider = ProviderKind::kBaseline;
  std::size_t baseline_dim = 64;
  RemoteConfig remote;

  TrainConfig train;
  std::uint64_t seed = 13;
  std::size_t threads = 1;

  // YAML file; relative paths resolve against the file's directory.
  static PipelineConfig load(const std::filesystem::path& path);

  // Checks that every referenced file exists; the error names the config key.
  void validate() const;

  nlohmann::json snapshot() const;
};

}  // namespace rarephen
