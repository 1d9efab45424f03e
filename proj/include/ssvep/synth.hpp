#pragma once

#include <cstdint>
#include <limits>

#include <json.hpp>

#include "ssvep/dataset_io.hpp"

namespace ssvep {

// Synthetic SSVEP recordings: trial(s, t, b) = A_{s,t} Y_t + noise, where
// A_{s,t} = B_s + perturbation * E_{s,t} with Gaussian B_s, E_{s,t} and the
// columns of harmonic h scaled by 1/h. Noise is white Gaussian, low-pass
// filtered at `noise_cutoff`, mixed spatially per subject and scaled so that
// signal power / noise power = snr. snr = 0 switches the signal off,
// snr = inf switches the noise off.
struct SynthSpec {
  int n_subjects = 6;
  int n_stimuli = 8;
  int n_blocks = 4;
  int n_channels = 8;
  double sampling_rate = 250.0;
  double snr = 1.0;
  int n_harmonics = 5;
  double freq_start = 8.0;
  double freq_step = 1.0;
  double phase_step = 0.5;  // in units of pi
  double pre_onset = 0.2;   // seconds
  double post_onset = 1.2;  // seconds of stimulation recorded
  double perturbation = 0.3;
  double noise_cutoff = 45.0;
  double noise_mixing = 0.5;

  void validate() const;
};

nlohmann::json synth_spec_to_json(const SynthSpec& s);
SynthSpec synth_spec_from_json(const nlohmann::json& j, SynthSpec base = {});

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed);

}  // namespace ssvep
