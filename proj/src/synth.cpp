#include "ssvep/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "ssvep/error.hpp"
#include "ssvep/filterbank.hpp"
#include "ssvep/reference.hpp"

namespace ssvep {

void SynthSpec::validate() const {
  auto bad = [](const std::string& m) { throw Error("invalid-argument", "synth: " + m); };
  if (n_subjects < 1 || n_stimuli < 2 || n_blocks < 1 || n_channels < 1) bad("dims must be positive");
  if (!(sampling_rate > 0.0)) bad("sampling_rate must be positive");
  if (!(snr >= 0.0)) bad("snr must be >= 0");
  if (n_harmonics < 1) bad("n_harmonics must be >= 1");
  if (!(freq_start > 0.0) || freq_step < 0.0) bad("invalid frequency grid");
  const double f_max = freq_start + freq_step * (n_stimuli - 1);
  if (!(n_harmonics * f_max < 0.5 * sampling_rate)) bad("highest harmonic above Nyquist");
  if (pre_onset < 0.0 || !(post_onset > 0.0)) bad("invalid epoch timing");
  if (!(noise_cutoff > 0.0 && noise_cutoff < 0.5 * sampling_rate)) bad("noise cut-off above Nyquist");
}

nlohmann::json synth_spec_to_json(const SynthSpec& s) {
  nlohmann::json snr = s.snr;
  if (std::isinf(s.snr)) snr = "inf";
  return {{"n_subjects", s.n_subjects},   {"n_stimuli", s.n_stimuli},
          {"n_blocks", s.n_blocks},       {"n_channels", s.n_channels},
          {"sampling_rate", s.sampling_rate}, {"snr", snr},
          {"n_harmonics", s.n_harmonics}, {"freq_start", s.freq_start},
          {"freq_step", s.freq_step},     {"phase_step", s.phase_step},
          {"pre_onset", s.pre_onset},     {"post_onset", s.post_onset},
          {"perturbation", s.perturbation}, {"noise_cutoff", s.noise_cutoff},
          {"noise_mixing", s.noise_mixing}};
}

SynthSpec synth_spec_from_json(const nlohmann::json& j, SynthSpec s) {
  s.n_subjects = j.value("n_subjects", s.n_subjects);
  s.n_stimuli = j.value("n_stimuli", s.n_stimuli);
  s.n_blocks = j.value("n_blocks", s.n_blocks);
  s.n_channels = j.value("n_channels", s.n_channels);
  s.sampling_rate = j.value("sampling_rate", s.sampling_rate);
  if (j.contains("snr")) {
    const auto& v = j.at("snr");
    s.snr = v.is_string() && v.get<std::string>() == "inf" ? std::numeric_limits<double>::infinity()
                                                           : v.get<double>();
  }
  s.n_harmonics = j.value("n_harmonics", s.n_harmonics);
  s.freq_start = j.value("freq_start", s.freq_start);
  s.freq_step = j.value("freq_step", s.freq_step);
  s.phase_step = j.value("phase_step", s.phase_step);
  s.pre_onset = j.value("pre_onset", s.pre_onset);
  s.post_onset = j.value("post_onset", s.post_onset);
  s.perturbation = j.value("perturbation", s.perturbation);
  s.noise_cutoff = j.value("noise_cutoff", s.noise_cutoff);
  s.noise_mixing = j.value("noise_mixing", s.noise_mixing);
  return s;
}

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

Dataset synth_generate(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const double fs = spec.sampling_rate;
  const int pre = static_cast<int>(std::lround(spec.pre_onset * fs));
  const int post = static_cast<int>(std::lround(spec.post_onset * fs));
  const int n_s = pre + post;
  const int n_c = spec.n_channels;
  constexpr int kWarmup = 200;

  Dataset ds;
  auto& m = ds.manifest;
  m.name = "synthetic";
  m.sampling_rate = fs;
  m.blocks_per_subject = spec.n_blocks;
  m.cue_offset = static_cast<double>(pre) / fs;
  m.latency_offset = 0.0;
  m.calibration_stimuli = spec.n_stimuli;
  m.trials_per_stimulus = spec.n_blocks;
  m.samples_per_epoch = n_s;
  for (int c = 0; c < n_c; ++c) m.channel_names.push_back("C" + std::to_string(c + 1));
  for (int t = 0; t < spec.n_stimuli; ++t) {
    m.stimuli.push_back({t, spec.freq_start + spec.freq_step * t,
                         std::fmod(spec.phase_step * t, 2.0) * std::numbers::pi});
  }
  for (int s = 0; s < spec.n_subjects; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "S%02d", s + 1);
    m.subjects.push_back({id, std::string(id) + ".bin", 0});
  }

  const auto refs = template_bank(m.stimuli, spec.n_harmonics, fs, post);
  const auto noise_filter = design_lowpass(spec.noise_cutoff, fs, 4);
  const bool signal_on = spec.snr > 0.0;
  const bool noise_on = !std::isinf(spec.snr);

  for (int s = 0; s < spec.n_subjects; ++s) {
    const Matrix base = gaussian(n_c, 2 * spec.n_harmonics, rng);
    std::vector<Matrix> mixing;
    for (int t = 0; t < spec.n_stimuli; ++t) {
      Matrix a = base + spec.perturbation * gaussian(n_c, 2 * spec.n_harmonics, rng);
      for (int h = 0; h < spec.n_harmonics; ++h) a.middleCols(2 * h, 2) /= (h + 1.0);
      mixing.push_back(std::move(a));
    }
    const Matrix spatial = Matrix::Identity(n_c, n_c) +
                           spec.noise_mixing / std::sqrt(static_cast<double>(n_c)) *
                               gaussian(n_c, n_c, rng);

    for (int b = 0; b < spec.n_blocks; ++b) {
      for (int t = 0; t < spec.n_stimuli; ++t) {
        const Matrix clean = mixing[static_cast<std::size_t>(t)] * refs[static_cast<std::size_t>(t)].data;
        const double signal_power = clean.array().square().mean();

        Epoch e;
        e.data = Matrix::Zero(n_c, n_s);
        if (signal_on) e.data.rightCols(post) = clean;
        if (noise_on) {
          Matrix noise(n_c, n_s);
          const Matrix white = gaussian(n_c, n_s + kWarmup, rng);
          for (int c = 0; c < n_c; ++c) {
            const Eigen::RowVectorXd lp = sos_filter(noise_filter.sections, white.row(c));
            noise.row(c) = lp.tail(n_s);
            const double sd = std::sqrt((noise.row(c).array() - noise.row(c).mean()).square().mean());
            if (sd > 0.0) noise.row(c) /= sd;
          }
          noise = spatial * noise;
          const double noise_power = noise.array().square().mean();
          const double target = signal_on ? signal_power / spec.snr : signal_power;
          e.data += std::sqrt(target / noise_power) * noise;
        }
        e.sampling_rate = fs;
        e.stimulus = t;
        e.subject = s;
        e.block = b;
        e.onset = pre;
        ds.epochs.push_back(std::move(e));
      }
    }
  }
  return ds;
}

}  // namespace ssvep
