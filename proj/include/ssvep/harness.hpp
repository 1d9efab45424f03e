#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssvep/dataset_io.hpp"
#include "ssvep/decoders.hpp"
#include "ssvep/filterbank.hpp"
#include "ssvep/lst.hpp"
#include "ssvep/metrics.hpp"
#include "ssvep/net.hpp"
#include "ssvep/synth.hpp"

namespace ssvep {

struct RunConfig {
  std::string dataset;             // directory with manifest.json; empty -> synth
  std::optional<SynthSpec> synth;  // used when dataset is empty
  std::vector<double> windows{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  int n_harmonics = kDefaultHarmonics;
  std::optional<FilterBankSpec> filterbank;  // default_filterbank(f_s) when unset
  NetConfig net;  // n_f, n_c, n_h, n_s and seed are filled in per fold
  TrainOptions training;
  SameOptions same;
  TdcaOptions tdca;
  std::vector<std::string> members{"net", "etrca", "tdca"};
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int jobs = 1;
  int calibration_block = 0;
  double gaze_shift = kGazeShiftSeconds;
  int n_source_subjects = 0;         // 0 -> every non-target subject
  std::vector<std::string> targets;  // subject ids; empty -> all

  // Throws "invalid-config".
  void validate() const;
};

nlohmann::json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

// "0.5:1.0:0.1" (inclusive range) or "0.5,1.0". Throws "invalid-argument".
std::vector<double> parse_windows(const std::string& text);

// The dataset a config points at: loaded from disk or generated from the
// synth spec with cfg.seed.
Dataset resolve_dataset(const RunConfig& cfg);

struct TrialPrediction {
  int block = 0;
  int stimulus = 0;
  int predicted = 0;
  std::map<std::string, int> member_predictions;
  Vector fused;
};

struct WindowResult {
  double window = 0.0;    // seconds of data
  double accuracy = 0.0;  // percent
  double itr = 0.0;       // bits/min with T = window + gaze shift
  std::map<std::string, double> member_accuracy;  // percent, each decoder alone
  double net_train_accuracy = -1.0;               // percent; -1 when the net was skipped
  std::vector<double> loss_history;
  std::vector<TrialPrediction> predictions;
};

struct FoldResult {
  std::string subject;
  int subject_index = 0;
  std::vector<std::string> sources;  // subjects the net was trained on
  std::vector<WindowResult> windows;
  double seconds = 0.0;
};

struct SummaryRow {
  double window = 0.0;
  MeanSe accuracy;
  MeanSe itr;
  std::map<std::string, MeanSe> members;
};

struct EvaluationResult {
  RunConfig config;
  int n_classes = 0;
  std::vector<FoldResult> folds;  // sorted by subject index
  std::vector<SummaryRow> summary;
};

std::vector<SummaryRow> summarize(const std::vector<FoldResult>& folds);

// Leave-one-subject-out evaluation. Throws "insufficient-subjects",
// "missing-calibration-block", "invalid-config".
EvaluationResult loso_evaluate(const RunConfig& cfg, const Dataset& dataset);
EvaluationResult loso_evaluate(const RunConfig& cfg);

// Net only, trained on every subject except `exclude` (-1: none) for one window.
TrainResult train_network(const RunConfig& cfg, const Dataset& dataset, double window,
                          int exclude = -1);

// Writes folds.csv, summary.csv, config.json, table.txt, predictions.csv and
// results.json (the only file carrying timing). Throws "io-failure".
void report_emit(const EvaluationResult& result, const std::filesystem::path& out_dir);

// Re-emits the reports from a results.json written by report_emit.
EvaluationResult load_results(const std::filesystem::path& results_json);

// "full", "no-mlst", "no-original", "members:<csv>", "n-sources:<N>".
// Throws "invalid-variant".
RunConfig apply_variant(const RunConfig& cfg, const std::string& variant);
EvaluationResult ablation_run(const RunConfig& cfg, const std::string& variant);

// Deterministic seed derivation shared by the harness and tests.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fold_seed(std::uint64_t seed, int fold_index);

}  // namespace ssvep
