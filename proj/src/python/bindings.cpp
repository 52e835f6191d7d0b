#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "rarephen/cli.hpp"
#include "rarephen/error.hpp"
#include "rarephen/eval.hpp"
#include "rarephen/io.hpp"
#include "rarephen/matcher.hpp"
#include "rarephen/model.hpp"
#include "rarephen/pipeline.hpp"
#include "rarephen/text.hpp"
#include "rarephen/weaklabel.hpp"

namespace py = pybind11;
using namespace rarephen;

namespace {

py::dict candidate_dict(const MentionCandidate& c) {
  py::dict d;
  d["doc_id"] = c.doc_id;
  d["m_start"] = c.m_start;
  d["m_end"] = c.m_end;
  d["surface"] = c.surface;
  d["cui"] = c.cui.code();
  d["context"] = c.context;
  d["window_span"] = py::make_tuple(c.window.start, c.window.end);
  d["structure_name"] = c.structure_name ? py::object(py::str(*c.structure_name)) : py::none();
  d["mention_in_context"] =
      py::make_tuple(c.mention_in_context.start, c.mention_in_context.end);
  return d;
}

std::vector<std::string> codes(const std::set<ConceptId>& s) {
  std::vector<std::string> out;
  for (const auto& c : s) out.push_back(c.code());
  return out;
}

py::dict metrics_dict(const MetricsReport& m) {
  py::dict d;
  d["tp"] = m.tp;
  d["fp"] = m.fp;
  d["fn"] = m.fn;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  d["n_pos"] = m.n_pos;
  d["n_total"] = m.n_total;
  return d;
}

AdmissionLabels to_labels(const std::map<std::string, std::vector<std::string>>& in) {
  AdmissionLabels out;
  for (const auto& [id, list] : in) {
    auto& s = out[id];
    for (const auto& code : list) s.insert(ConceptId::ordo(code));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rare-disease phenotyping core";

  static py::exception<Error> error(m, "RarephenError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error((std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  m.def("normalize", &text::normalize_utf8, py::arg("text"));

  py::class_<Matcher>(m, "Matcher")
      .def(py::init<std::vector<std::string>>(), py::arg("patterns"))
      .def("find",
           [](const Matcher& self, const std::string& text) {
             std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
             for (const auto& match : self.find_utf8(text)) {
               out.emplace_back(match.start, match.end, match.pattern);
             }
             return out;
           },
           py::arg("text"))
      .def("__len__", &Matcher::size);

  py::class_<OntologyStore>(m, "OntologyStore")
      .def_static("load",
                  [](const std::string& ordo_umls, const std::string& ordo_icd10,
                     const std::string& icd9_icd10, const std::string& icd9_umls,
                     const std::string& ordo_meta) {
                    return OntologyStore::load(
                        {ordo_umls, ordo_icd10, icd9_icd10, icd9_umls, ordo_meta});
                  },
                  py::arg("ordo_umls"), py::arg("ordo_icd10"), py::arg("icd9_icd10"),
                  py::arg("icd9_umls"), py::arg("ordo_meta"))
      .def("umls_to_ordo",
           [](const OntologyStore& s, const std::string& cui) {
             return codes(s.umls_to_ordo(ConceptId::umls(cui)));
           })
      .def("icd9_to_ordo",
           [](const OntologyStore& s, std::string code) {
             std::erase(code, '.');
             return codes(s.icd9_to_ordo(ConceptId::icd9(code)));
           })
      .def("is_rare_umls",
           [](const OntologyStore& s, const std::string& cui) {
             return s.is_rare_umls(ConceptId::umls(cui));
           })
      .def("is_group_of_disorders", [](const OntologyStore& s, const std::string& ordo) {
        return s.is_group_of_disorders(ConceptId::ordo(ordo));
      });

  m.def("rule_prevalence", &rule_prevalence, py::arg("freq"), py::arg("total"), py::arg("p"));
  m.def("weak_label_summary",
        [](const std::string& candidates_path, std::size_t l, double p) {
          const WeakDataset w =
              weak_label(io::read_candidates_jsonl(candidates_path), WeakRuleParams{l, p});
          py::dict d;
          d["positives"] = w.positives();
          d["negatives"] = w.negatives();
          d["unlabeled"] = w.unlabeled.size();
          d["total_links"] = w.total_links;
          return d;
        },
        py::arg("candidates_path"), py::arg("l") = 3, py::arg("p") = 0.005);

  m.def("metrics_from_counts",
        [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t n_total) {
          return metrics_dict(metrics_from_counts(tp, fp, fn, n_total));
        },
        py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("n_total") = 0);
  m.def("micro_admission_metrics",
        [](const std::map<std::string, std::vector<std::string>>& predicted,
           const std::map<std::string, std::vector<std::string>>& gold,
           const std::vector<std::string>& universe) {
          std::set<ConceptId> u;
          for (const auto& c : universe) u.insert(ConceptId::ordo(c));
          return metrics_dict(micro_admission_metrics(to_labels(predicted), to_labels(gold), u));
        },
        py::arg("predicted"), py::arg("gold"), py::arg("label_universe"));

  py::class_<LogRegModel>(m, "Model")
      .def_static("load", [](const std::string& path) { return load(path); })
      .def("save", [](const LogRegModel& self, const std::string& path) { save(self, path); })
      .def_property_readonly("dim", &LogRegModel::dim)
      .def_readonly("weights", &LogRegModel::weights)
      .def_readonly("bias", &LogRegModel::bias)
      .def_property_readonly("training_kind", [](const LogRegModel& self) {
        return std::string(to_string(self.provenance.training_kind));
      });

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init([](const std::string& config_path) {
             return std::make_unique<Pipeline>(PipelineConfig::load(config_path));
           }),
           py::arg("config_path"))
      .def("extract",
           [](const Pipeline& self) {
             const Extraction ex = self.extract(self.load_corpus());
             py::list out;
             for (const auto& c : ex.filtered) out.append(candidate_dict(c));
             return out;
           })
      .def("train_weak_model",
           [](const Pipeline& self) {
             return self.train_weak_model(self.create_weak_training_data(self.load_corpus()));
           })
      .def("infer",
           [](const Pipeline& self, const LogRegModel& model) {
             const auto results = aggregate_admissions(self.infer_corpus(self.load_corpus(), model));
             py::dict out;
             for (const auto& r : results) out[py::str(r.admission_id)] = codes(r.ordo_set);
             return out;
           },
           py::arg("model"))
      .def("params_hash", &Pipeline::params_hash);

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out, err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
