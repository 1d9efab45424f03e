#pragma once

#include <span>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

inline constexpr int kDefaultHarmonics = 5;

// Sine-cosine reference for one stimulus: 2*harmonics x samples, rows ordered
// sin(h), cos(h) for h = 1..harmonics with argument 2*pi*h*f*t + h*phase and
// t = 1/f_s, 2/f_s, ..., N_s/f_s.
struct ReferenceTemplate {
  Matrix data;
  int stimulus = 0;
  int harmonics = 0;
  double sampling_rate = 0.0;
};

// Throws "harmonic-above-nyquist" when harmonics * f >= f_s / 2.
ReferenceTemplate sine_cosine_template(const StimulusSpec& stimulus, int harmonics,
                                       double sampling_rate, int samples);

std::vector<ReferenceTemplate> template_bank(std::span<const StimulusSpec> stimuli,
                                             int harmonics, double sampling_rate,
                                             int samples);

}  // namespace ssvep
