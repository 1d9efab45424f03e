#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ssvep/decoders.hpp"
#include "ssvep/error.hpp"
#include "ssvep/fusion.hpp"
#include "ssvep/harness.hpp"
#include "ssvep/lst.hpp"
#include "ssvep/metrics.hpp"
#include "ssvep/reference.hpp"
#include "ssvep/synth.hpp"

namespace py = pybind11;
using namespace ssvep;

namespace {

RunConfig config_from(const py::object& cfg) {
  if (cfg.is_none()) {
    RunConfig c;
    c.synth = SynthSpec{};
    return c;
  }
  const std::string text = py::module_::import("json").attr("dumps")(cfg).cast<std::string>();
  RunConfig c = run_config_from_json(nlohmann::json::parse(text));
  if (c.dataset.empty() && !c.synth) c.synth = SynthSpec{};
  return c;
}

py::dict summary_dict(const SummaryRow& s) {
  py::dict d;
  d["window"] = s.window;
  d["accuracy_mean"] = s.accuracy.mean;
  d["accuracy_se"] = s.accuracy.se;
  d["itr_mean"] = s.itr.mean;
  d["itr_se"] = s.itr.se;
  d["n"] = s.accuracy.n;
  py::dict members;
  for (const auto& [k, v] : s.members) members[py::str(k)] = py::make_tuple(v.mean, v.se);
  d["members"] = members;
  return d;
}

py::dict result_dict(const EvaluationResult& r) {
  py::list summary, folds;
  for (const auto& s : r.summary) summary.append(summary_dict(s));
  for (const auto& f : r.folds) {
    py::dict d;
    d["subject"] = f.subject;
    d["sources"] = f.sources;
    py::list windows;
    for (const auto& w : f.windows) {
      py::dict wd;
      wd["window"] = w.window;
      wd["accuracy"] = w.accuracy;
      wd["itr"] = w.itr;
      wd["member_accuracy"] = w.member_accuracy;
      windows.append(wd);
    }
    d["windows"] = windows;
    folds.append(d);
  }
  py::dict out;
  out["n_classes"] = r.n_classes;
  out["summary"] = summary;
  out["folds"] = folds;
  return out;
}

py::dict dataset_dict(const Dataset& ds) {
  py::list data, labels, subjects, blocks;
  for (const auto& e : ds.epochs) {
    data.append(py::cast(e.data));
    labels.append(e.stimulus);
    subjects.append(e.subject);
    blocks.append(e.block);
  }
  py::dict d;
  d["data"] = data;
  d["stimulus"] = labels;
  d["subject"] = subjects;
  d["block"] = blocks;
  d["sampling_rate"] = ds.manifest.sampling_rate;
  d["onset"] = ds.manifest.onset_sample();
  std::vector<double> freqs, phases;
  for (const auto& s : ds.manifest.stimuli) {
    freqs.push_back(s.frequency);
    phases.push_back(s.phase);
  }
  d["frequencies"] = freqs;
  d["phases"] = phases;
  return d;
}

ScoreVector score_from(const Eigen::VectorXd& v, const std::string& id) { return {v, id}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "One-shot SSVEP decoding toolkit";

  static py::exception<Error> err(m, "SsvepError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code, message)
      PyErr_SetObject(err.ptr(), py::make_tuple(e.code(), e.what()).ptr());
    }
  });

  m.def("reference_template",
        [](double frequency, double phase, int harmonics, double fs, int samples) {
          return sine_cosine_template(StimulusSpec{0, frequency, phase}, harmonics, fs, samples).data;
        },
        py::arg("frequency"), py::arg("phase"), py::arg("harmonics"), py::arg("sampling_rate"),
        py::arg("samples"), "2*harmonics x samples sine-cosine reference");

  m.def("lst_solve", [](const Matrix& target, const Matrix& source) { return lst_solve(target, source).data; },
        py::arg("target"), py::arg("source"), "least-squares P minimising ||target - P source||");

  m.def("cca_correlations",
        [](const Matrix& x, const Matrix& y, int n_comp) { return cca_correlations(x, y, n_comp).correlations; },
        py::arg("x"), py::arg("y"), py::arg("n_comp") = 1);

  m.def("filterbank_decompose",
        [](const Matrix& x, double fs, int n_bands) {
          return FilterBank(default_filterbank(fs, n_bands), fs).decompose(x);
        },
        py::arg("x"), py::arg("sampling_rate"), py::arg("n_bands") = 3);

  m.def("itr", &itr, py::arg("classes"), py::arg("accuracy"), py::arg("selection_seconds"));

  m.def("minmax_normalize",
        [](const Eigen::VectorXd& v) { return minmax_normalize(score_from(v, "x")).scores; },
        py::arg("scores"));

  m.def("fuse",
        [](const std::map<std::string, Eigen::VectorXd>& scores, std::vector<std::string> members) {
          std::vector<ScoreVector> sets;
          for (const auto& [k, v] : scores) sets.push_back(score_from(v, k));
          if (members.empty()) {
            for (const auto& s : sets) members.push_back(s.decoder);
          }
          const auto d = fuse_and_decide(sets, FusionConfig{members});
          return py::make_tuple(d.predicted, d.fused.scores);
        },
        py::arg("scores"), py::arg("members") = std::vector<std::string>{},
        "sum of min-max normalised member scores and its argmax");

  m.def("synth_generate",
        [](const py::object& spec, std::uint64_t seed) {
          SynthSpec s;
          if (!spec.is_none()) {
            const std::string text = py::module_::import("json").attr("dumps")(spec).cast<std::string>();
            s = synth_spec_from_json(nlohmann::json::parse(text));
          }
          return dataset_dict(synth_generate(s, seed));
        },
        py::arg("spec") = py::none(), py::arg("seed") = 0);

  m.def("synth_save",
        [](const py::object& spec, std::uint64_t seed, const std::filesystem::path& dir) {
          SynthSpec s;
          if (!spec.is_none()) {
            const std::string text = py::module_::import("json").attr("dumps")(spec).cast<std::string>();
            s = synth_spec_from_json(nlohmann::json::parse(text));
          }
          save_dataset(synth_generate(s, seed), dir);
        },
        py::arg("spec"), py::arg("seed"), py::arg("out_dir"), "write a synthetic dataset to disk");

  m.def("evaluate",
        [](const py::object& cfg) {
          const RunConfig c = config_from(cfg);
          EvaluationResult r;
          {
            py::gil_scoped_release release;
            r = loso_evaluate(c);
          }
          return result_dict(r);
        },
        py::arg("config") = py::none(), "leave-one-subject-out evaluation from a config dict");

  m.def("ablate",
        [](const py::object& cfg, const std::string& variant) {
          const RunConfig c = config_from(cfg);
          EvaluationResult r;
          {
            py::gil_scoped_release release;
            r = ablation_run(c, variant);
          }
          return result_dict(r);
        },
        py::arg("config"), py::arg("variant"));

  m.def("benchmark",
        [](const py::object& cfg, const std::filesystem::path& out_dir) {
          const RunConfig c = config_from(cfg);
          EvaluationResult r;
          {
            py::gil_scoped_release release;
            r = loso_evaluate(c);
            report_emit(r, out_dir);
          }
          return result_dict(r);
        },
        py::arg("config"), py::arg("out_dir"), "evaluation plus report files");
}
