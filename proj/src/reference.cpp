#include "ssvep/reference.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "ssvep/error.hpp"

namespace ssvep {

ReferenceTemplate sine_cosine_template(const StimulusSpec& stimulus, int harmonics,
                                       double sampling_rate, int samples) {
  if (harmonics < 1 || !(sampling_rate > 0.0) || samples < 2) {
    throw Error("invalid-argument", "template needs harmonics >= 1, f_s > 0, samples >= 2");
  }
  if (!(harmonics * stimulus.frequency < 0.5 * sampling_rate)) {
    std::ostringstream msg;
    msg << "stimulus " << stimulus.index << ": harmonic " << harmonics << " of "
        << stimulus.frequency << " Hz is not below Nyquist (" << 0.5 * sampling_rate << " Hz)";
    throw Error("harmonic-above-nyquist", msg.str());
  }
  ReferenceTemplate ref;
  ref.stimulus = stimulus.index;
  ref.harmonics = harmonics;
  ref.sampling_rate = sampling_rate;
  ref.data.resize(2 * harmonics, samples);
  for (int h = 1; h <= harmonics; ++h) {
    const double w = 2.0 * std::numbers::pi * h * stimulus.frequency;
    const double phi = h * stimulus.phase;
    for (int n = 0; n < samples; ++n) {
      const double arg = w * (n + 1) / sampling_rate + phi;
      ref.data(2 * (h - 1), n) = std::sin(arg);
      ref.data(2 * (h - 1) + 1, n) = std::cos(arg);
    }
  }
  return ref;
}

std::vector<ReferenceTemplate> template_bank(std::span<const StimulusSpec> stimuli,
                                             int harmonics, double sampling_rate,
                                             int samples) {
  std::vector<ReferenceTemplate> bank;
  bank.reserve(stimuli.size());
  for (const auto& s : stimuli) {
    bank.push_back(sine_cosine_template(s, harmonics, sampling_rate, samples));
  }
  return bank;
}

}  // namespace ssvep
