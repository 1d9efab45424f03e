// Command-line front end: synth, train, evaluate, benchmark, ablate, report.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "ssvep/error.hpp"
#include "ssvep/fusion.hpp"
#include "ssvep/harness.hpp"
#include "ssvep/model_io.hpp"

namespace fs = std::filesystem;
using namespace ssvep;

namespace {

struct Common {
  std::string config;
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string windows;
  std::string members;
  int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_members = true) {
  cmd->add_option("--config", c.config, "JSON run config");
  cmd->add_option("--dataset", c.dataset, "dataset directory (manifest.json + binaries)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--windows", c.windows, "window lengths, e.g. 0.5:1.0:0.1");
  if (with_members) cmd->add_option("--members", c.members, "fusion members, e.g. net,etrca,tdca");
  cmd->add_option("--jobs", c.jobs, "folds evaluated in parallel");
}

RunConfig build_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (!c.dataset.empty()) {
    cfg.dataset = c.dataset;
    cfg.synth.reset();
  }
  if (cfg.dataset.empty() && !cfg.synth) cfg.synth = SynthSpec{};
  if (c.seed) cfg.seed = *c.seed;
  if (!c.windows.empty()) cfg.windows = parse_windows(c.windows);
  if (!c.members.empty()) cfg.members = parse_members(c.members);
  if (c.jobs > 0) cfg.jobs = c.jobs;
  if (!c.out.empty()) cfg.out_dir = c.out;
  cfg.validate();
  return cfg;
}

void print_summary(const EvaluationResult& r) {
  for (const auto& s : r.summary) {
    std::printf("window=%.2f accuracy=%.2f+/-%.2f itr=%.2f+/-%.2f n=%d\n", s.window, s.accuracy.mean,
                s.accuracy.se, s.itr.mean, s.itr.se, s.accuracy.n);
  }
}

int subject_index(const DatasetManifest& m, const std::string& id) {
  for (int s = 0; s < m.n_subjects(); ++s) {
    if (m.subjects[static_cast<std::size_t>(s)].id == id) return s;
  }
  throw Error("invalid-argument", "unknown subject '" + id + "'");
}

std::string quote(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch == '\n' ? ' ' : ch;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // the network allocates many mid-sized temporaries; keep them off mmap
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 128 << 20);
#endif
  CLI::App app{"One-shot SSVEP decoding toolkit"};
  app.require_subcommand(1);

  Common synth_c, train_c, eval_c, bench_c, ablate_c;
  std::optional<double> snr;
  std::string target, train_target;
  std::vector<std::string> variants;
  std::string results_path, report_out;

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--config", synth_c.config, "JSON run config (its synth section is used)");
  synth->add_option("--out", synth_c.out, "output directory")->required();
  synth->add_option("--seed", synth_c.seed, "generator seed");
  synth->add_option("--snr", snr, "signal-to-noise power ratio (inf allowed)");

  auto* trn = app.add_subcommand("train", "train the network on source subjects");
  add_common(trn, train_c, false);
  trn->add_option("--target", train_target, "subject left out of training");

  auto* evaluate = app.add_subcommand("evaluate", "leave-one-subject-out fold for one target");
  add_common(evaluate, eval_c);
  evaluate->add_option("--target", target, "target subject id")->required();

  auto* bench = app.add_subcommand("benchmark", "full leave-one-subject-out evaluation");
  add_common(bench, bench_c);

  auto* ablate = app.add_subcommand("ablate", "ablation variants");
  add_common(ablate, ablate_c);
  ablate->add_option("--variant", variants,
                     "full | no-mlst | no-original | members:<csv> | n-sources:<N> (repeatable)")
      ->required();

  auto* report = app.add_subcommand("report", "re-emit reports from results.json");
  report->add_option("--results", results_path, "results.json of an earlier run")->required();
  report->add_option("--out", report_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: code=invalid-arguments message=\"" << quote(e.what()) << "\"\n";
    return 2;
  }

  try {
    if (*synth) {
      RunConfig cfg = synth_c.config.empty() ? RunConfig{} : load_run_config(synth_c.config);
      SynthSpec spec = cfg.synth.value_or(SynthSpec{});
      if (snr) spec.snr = *snr;
      const std::uint64_t seed = synth_c.seed.value_or(cfg.seed);
      const Dataset ds = synth_generate(spec, seed);
      save_dataset(ds, synth_c.out);
      std::printf("wrote %zu epochs for %d subjects to %s\n", ds.epochs.size(), ds.manifest.n_subjects(),
                  synth_c.out.c_str());
    } else if (*trn) {
      RunConfig cfg = build_config(train_c);
      const Dataset ds = resolve_dataset(cfg);
      const int exclude = train_target.empty() ? -1 : subject_index(ds.manifest, train_target);
      const double window = cfg.windows.back();
      const auto result = train_network(cfg, ds, window, exclude);
      const fs::path out = cfg.out_dir;
      fs::create_directories(out);
      save_net_params(result.params, out / "net");
      write_loss_history(result.loss_history, out / "loss_history.csv");
      std::printf("window=%.2f parameters=%ld train_accuracy=%.2f final_loss=%.6f\n", window,
                  static_cast<long>(result.params.size()), 100.0 * result.train_accuracy,
                  result.loss_history.back());
    } else if (*evaluate || *bench || *ablate) {
      const Common& c = *evaluate ? eval_c : *bench ? bench_c : ablate_c;
      RunConfig cfg = build_config(c);
      if (*evaluate) cfg.targets = {target};
      if (*ablate) {
        std::ostringstream table;
        table << "variant,window,accuracy_mean,accuracy_se,net_mean,net_se\n";
        for (const auto& v : variants) {
          RunConfig vc = cfg;
          vc.out_dir = (fs::path(cfg.out_dir) / v).string();
          for (auto& ch : vc.out_dir) {
            if (ch == ':' || ch == ',') ch = '_';
          }
          const auto r = ablation_run(vc, v);
          report_emit(r, vc.out_dir);
          std::printf("variant=%s\n", v.c_str());
          print_summary(r);
          for (const auto& s : r.summary) {
            char buf[160];
            auto net = s.members.find("net");
            std::snprintf(buf, sizeof buf, "%s,%.2f,%.6f,%.6f,", v.c_str(), s.window, s.accuracy.mean,
                          s.accuracy.se);
            table << buf;
            if (net != s.members.end()) {
              std::snprintf(buf, sizeof buf, "%.6f,%.6f", net->second.mean, net->second.se);
              table << buf;
            } else {
              table << ',';
            }
            table << '\n';
          }
        }
        write_text_file(fs::path(cfg.out_dir) / "ablation.csv", table.str());
      } else {
        const auto r = loso_evaluate(cfg);
        report_emit(r, cfg.out_dir);
        print_summary(r);
      }
    } else if (*report) {
      const auto r = load_results(results_path);
      report_emit(r, report_out);
      print_summary(r);
    }
  } catch (const Error& e) {
    std::cerr << "error: code=" << e.code() << " message=\"" << quote(e.what()) << "\"\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: code=internal message=\"" << quote(e.what()) << "\"\n";
    return 1;
  }
  return 0;
}
