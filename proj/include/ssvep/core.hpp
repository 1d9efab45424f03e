#pragma once

#include <Eigen/Dense>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace ssvep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kUnlabeled = -1;

struct StimulusSpec {
  int index = 0;
  double frequency = 0.0;  // Hz
  double phase = 0.0;      // radians
};

// Throws "invalid-stimuli" unless frequencies are positive, there are at least
// two targets and indices run 0..N_f-1 in order.
void validate_stimuli(std::span<const StimulusSpec> stimuli);

// One multi-channel trial. `data` is channels x samples in source units.
// `onset` is the sample index of stimulus onset inside `data`; windows are
// addressed relative to it.
struct Epoch {
  Matrix data;
  double sampling_rate = 0.0;
  int stimulus = kUnlabeled;
  int subject = 0;  // index into DatasetManifest::subjects
  int block = 0;
  int onset = 0;

  Eigen::Index channels() const { return data.rows(); }
  Eigen::Index samples() const { return data.cols(); }
  bool labeled() const { return stimulus != kUnlabeled; }
};

struct SubjectEntry {
  std::string id;
  std::string file;
  int samples = 0;  // per-epoch sample count; 0 means manifest default
};

struct DatasetManifest {
  std::string name;
  double sampling_rate = 0.0;
  std::vector<SubjectEntry> subjects;
  std::vector<StimulusSpec> stimuli;
  int blocks_per_subject = 0;
  std::vector<std::string> channel_names;
  double latency_offset = 0.0;  // seconds from onset to the analysis window
  double cue_offset = 0.0;      // seconds of pre-onset data at epoch start
  int calibration_stimuli = 0;  // K
  int trials_per_stimulus = 0;  // N_trial
  int samples_per_epoch = 0;

  int n_stimuli() const { return static_cast<int>(stimuli.size()); }
  int n_channels() const { return static_cast<int>(channel_names.size()); }
  int n_subjects() const { return static_cast<int>(subjects.size()); }
  int samples_for(int subject) const;
  int onset_sample() const;
};

struct WindowSpec {
  double start_offset = 0.0;  // seconds after onset
  double length = 1.0;        // seconds
};

struct ValidationReport {
  bool passed = true;
  std::vector<std::string> problems;
  // subject id -> trial count per stimulus index
  std::map<std::string, std::vector<int>> counts;
};

ValidationReport validate_dataset(const DatasetManifest& manifest,
                                  std::span<const Epoch> epochs);

// Slices `length * f_s` samples starting `start_offset * f_s` after onset.
// The returned epoch has onset 0. Throws "window-out-of-range".
Epoch epoch_window(const Epoch& epoch, const WindowSpec& window);

int window_samples(double length, double sampling_rate);

}  // namespace ssvep
