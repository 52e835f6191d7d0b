#include "rarephen/config.hpp"

#include <yaml-cpp/yaml.h>

#include "rarephen/error.hpp"

namespace rarephen {

namespace {

namespace fs = std::filesystem;

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  return v.as<T>();
}

}  // namespace

PipelineConfig PipelineConfig::load(const fs::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::kIo, "cannot open config " + path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();

  PipelineConfig c;
  std::string current_key;
  auto required_path = [&](const YAML::Node& node, const std::string& key,
                           const std::string& full_key) {
    current_key = full_key;
    const YAML::Node v = node[key];
    if (!v || v.IsNull()) {
      throw Error(ErrorKind::kInvalidArgument, "config key '" + full_key + "' is missing");
    }
    return resolve(base, v.as<std::string>());
  };

  try {
    c.corpus = required_path(root, "corpus", "corpus");
    c.synonyms = required_path(root, "synonyms", "synonyms");
    if (root["triggers"] && !root["triggers"].IsNull()) {
      c.triggers = resolve(base, root["triggers"].as<std::string>());
    }
    const YAML::Node onto = root["ontology"];
    if (!onto || !onto.IsMap()) {
      throw Error(ErrorKind::kInvalidArgument, "config key 'ontology' is missing");
    }
    c.ontology.ordo_umls = required_path(onto, "ordo_umls", "ontology.ordo_umls");
    c.ontology.ordo_icd10 = required_path(onto, "ordo_icd10", "ontology.ordo_icd10");
    c.ontology.icd9_icd10 = required_path(onto, "icd9_icd10", "ontology.icd9_icd10");
    c.ontology.icd9_umls = required_path(onto, "icd9_umls", "ontology.icd9_umls");
    c.ontology.ordo_meta = required_path(onto, "ordo_meta", "ontology.ordo_meta");

    if (const YAML::Node rules = root["rules"]) {
      current_key = "rules";
      c.rules.l = scalar<std::size_t>(rules, "l", c.rules.l);
      c.rules.p = scalar<double>(rules, "p", c.rules.p);
      const auto scope = scalar<std::string>(rules, "frequency_scope", "post_filter");
      if (scope == "post_filter") {
        c.frequency_scope = FrequencyScope::kPostFilter;
      } else if (scope == "pre_filter") {
        c.frequency_scope = FrequencyScope::kPreFilter;
      } else {
        throw Error(ErrorKind::kInvalidArgument,
                    "config key 'rules.frequency_scope' must be post_filter or pre_filter");
      }
    }
    if (const YAML::Node enc = root["encoding"]) {
      current_key = "encoding";
      c.encoding.mask_mention = scalar<bool>(enc, "mask", c.encoding.mask_mention);
      c.encoding.use_structure = scalar<bool>(enc, "use_structure", c.encoding.use_structure);
      c.encoding.window_tokens = scalar<std::size_t>(enc, "window", c.encoding.window_tokens);
    }
    if (const YAML::Node provider = root["provider"]) {
      current_key = "provider";
      std::string kind = "baseline";
      if (provider.IsScalar()) {
        kind = provider.as<std::string>();
      } else {
        kind = scalar<std::string>(provider, "kind", kind);
        c.baseline_dim = scalar<std::size_t>(provider, "dim", c.baseline_dim);
        c.remote.dim = c.baseline_dim;
        c.remote.base_url = scalar<std::string>(provider, "url", c.remote.base_url);
        c.remote.timeout = std::chrono::milliseconds(
            scalar<long>(provider, "timeout_ms", static_cast<long>(c.remote.timeout.count())));
        c.remote.max_in_flight = scalar<std::size_t>(provider, "max_in_flight", c.remote.max_in_flight);
        c.remote.batch_size = scalar<std::size_t>(provider, "batch_size", c.remote.batch_size);
      }
      if (kind == "baseline") {
        c.provider = ProviderKind::kBaseline;
      } else if (kind == "remote") {
        c.provider = ProviderKind::kRemote;
      } else {
        throw Error(ErrorKind::kInvalidArgument, "config key 'provider' must be baseline or remote");
      }
    }
    if (const YAML::Node train = root["train"]) {
      current_key = "train";
      c.train.learning_rate = scalar<double>(train, "learning_rate", c.train.learning_rate);
      c.train.epochs = scalar<std::size_t>(train, "epochs", c.train.epochs);
      c.train.l2 = scalar<double>(train, "l2", c.train.l2);
      if (train["subsample"] && !train["subsample"].IsNull()) {
        c.train.subsample = train["subsample"].as<std::size_t>();
      }
    }
    current_key = "seed";
    c.seed = scalar<std::uint64_t>(root, "seed", c.seed);
    current_key = "threads";
    c.threads = scalar<std::size_t>(root, "threads", c.threads);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::kParse, path.string() + ": config key '" + current_key + "': " + e.what());
  }
  c.train.seed = c.seed;
  c.rules.validate();
  c.train.validate();
  return c;
}

void PipelineConfig::validate() const {
  auto must_exist = [](const fs::path& p, const std::string& key) {
    if (p.empty()) throw Error(ErrorKind::kInvalidArgument, "config key '" + key + "' is missing");
    if (!fs::exists(p)) {
      throw Error(ErrorKind::kIo, "config key '" + key + "': file not found: " + p.string());
    }
  };
  must_exist(corpus, "corpus");
  must_exist(synonyms, "synonyms");
  if (triggers) must_exist(*triggers, "triggers");
  must_exist(ontology.ordo_umls, "ontology.ordo_umls");
  must_exist(ontology.ordo_icd10, "ontology.ordo_icd10");
  must_exist(ontology.icd9_icd10, "ontology.icd9_icd10");
  must_exist(ontology.icd9_umls, "ontology.icd9_umls");
  must_exist(ontology.ordo_meta, "ontology.ordo_meta");
  rules.validate();
  train.validate();
}

nlohmann::json PipelineConfig::snapshot() const {
  nlohmann::json provider_json = {
      {"kind", provider == ProviderKind::kBaseline ? "baseline" : "remote"},
      {"dim", provider == ProviderKind::kBaseline ? baseline_dim : remote.dim},
  };
  if (provider == ProviderKind::kRemote) {
    provider_json["url"] = remote.base_url;
    provider_json["timeout_ms"] = remote.timeout.count();
    provider_json["max_in_flight"] = remote.max_in_flight;
    provider_json["batch_size"] = remote.batch_size;
  }
  return {
      {"corpus", corpus.string()},
      {"synonyms", synonyms.string()},
      {"triggers", triggers ? nlohmann::json(triggers->string()) : nlohmann::json(nullptr)},
      {"ontology",
       {{"ordo_umls", ontology.ordo_umls.string()},
        {"ordo_icd10", ontology.ordo_icd10.string()},
        {"icd9_icd10", ontology.icd9_icd10.string()},
        {"icd9_umls", ontology.icd9_umls.string()},
        {"ordo_meta", ontology.ordo_meta.string()}}},
      {"rules",
       {{"l", rules.l},
        {"p", rules.p},
        {"frequency_scope",
         frequency_scope == FrequencyScope::kPostFilter ? "post_filter" : "pre_filter"}}},
      {"encoding",
       {{"mask", encoding.mask_mention},
        {"use_structure", encoding.use_structure},
        {"window", encoding.window_tokens}}},
      {"provider", provider_json},
      {"train",
       {{"learning_rate", train.learning_rate},
        {"epochs", train.epochs},
        {"l2", train.l2},
        {"subsample", train.subsample ? nlohmann::json(*train.subsample) : nlohmann::json(nullptr)}}},
      {"seed", seed},
  };
}

}  // namespace rarephen
