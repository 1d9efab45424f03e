#include "ssvep/core.hpp"

#include <cmath>
#include <sstream>
#include <tuple>

#include "ssvep/error.hpp"

namespace ssvep {

void validate_stimuli(std::span<const StimulusSpec> stimuli) {
  if (stimuli.size() < 2) {
    throw Error("invalid-stimuli", "at least two stimuli are required");
  }
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    const auto& s = stimuli[i];
    if (s.index != static_cast<int>(i)) {
      throw Error("invalid-stimuli",
                  "stimulus indices must be contiguous from 0 (position " +
                      std::to_string(i) + " has index " +
                      std::to_string(s.index) + ")");
    }
    if (!(s.frequency > 0.0) || !std::isfinite(s.frequency)) {
      throw Error("invalid-stimuli", "stimulus " + std::to_string(i) +
                                         " has non-positive frequency");
    }
  }
}

int DatasetManifest::samples_for(int subject) const {
  const int s = subjects.at(static_cast<std::size_t>(subject)).samples;
  return s > 0 ? s : samples_per_epoch;
}

int DatasetManifest::onset_sample() const {
  return static_cast<int>(std::lround(cue_offset * sampling_rate));
}

ValidationReport validate_dataset(const DatasetManifest& manifest,
                                  std::span<const Epoch> epochs) {
  ValidationReport report;
  auto fail = [&](std::string msg) {
    report.passed = false;
    report.problems.push_back(std::move(msg));
  };

  if (epochs.empty()) {
    fail("no epochs");
    return report;
  }
  const int n_f = manifest.n_stimuli();
  const int n_c = manifest.n_channels();
  if (n_f < 2) fail("manifest lists fewer than two stimuli");
  if (manifest.subjects.empty()) fail("manifest lists no subjects");
  if (manifest.calibration_stimuli != n_f) {
    fail("one-shot mode requires K = N_f (K=" +
         std::to_string(manifest.calibration_stimuli) +
         ", N_f=" + std::to_string(n_f) + ")");
  }

  for (const auto& subj : manifest.subjects) {
    report.counts[subj.id] = std::vector<int>(static_cast<std::size_t>(std::max(n_f, 0)), 0);
  }
  // (subject, block, stimulus) occupancy for the one-trial-per-cell rule.
  std::map<std::tuple<int, int, int>, int> cells;

  for (const auto& e : epochs) {
    std::ostringstream where;
    const bool subject_ok = e.subject >= 0 && e.subject < manifest.n_subjects();
    where << "subject "
          << (subject_ok ? manifest.subjects[static_cast<std::size_t>(e.subject)].id
                         : std::to_string(e.subject))
          << " block " << e.block;
    if (!subject_ok) {
      fail(where.str() + ": subject index out of range");
      continue;
    }
    if (e.channels() != n_c) {
      fail(where.str() + ": " + std::to_string(e.channels()) +
           " channels, manifest has " + std::to_string(n_c));
    }
    if (e.samples() != manifest.samples_for(e.subject)) {
      fail(where.str() + ": " + std::to_string(e.samples()) +
           " samples, manifest expects " +
           std::to_string(manifest.samples_for(e.subject)));
    }
    if (e.samples() < 2) fail(where.str() + ": fewer than two samples");
    if (e.sampling_rate != manifest.sampling_rate) {
      fail(where.str() + ": sampling rate mismatch");
    }
    if (!e.data.allFinite()) fail(where.str() + ": non-finite values");
    if (e.block < 0 || e.block >= manifest.blocks_per_subject) {
      fail(where.str() + ": block index out of range");
    }
    if (e.stimulus == kUnlabeled) continue;
    if (e.stimulus < 0 || e.stimulus >= n_f) {
      fail(where.str() + ": stimulus index " + std::to_string(e.stimulus) +
           " out of range");
      continue;
    }
    const auto& id = manifest.subjects[static_cast<std::size_t>(e.subject)].id;
    ++report.counts[id][static_cast<std::size_t>(e.stimulus)];
    ++cells[{e.subject, e.block, e.stimulus}];
  }

  for (const auto& [key, n] : cells) {
    if (n != 1) {
      const auto& [s, b, t] = key;
      fail("subject " + manifest.subjects[static_cast<std::size_t>(s)].id +
           " block " + std::to_string(b) + " stimulus " + std::to_string(t) +
           ": " + std::to_string(n) + " trials, expected exactly one");
    }
  }
  for (const auto& [id, per_stim] : report.counts) {
    for (std::size_t t = 0; t < per_stim.size(); ++t) {
      if (per_stim[t] != manifest.blocks_per_subject) {
        fail("subject " + id + " stimulus " + std::to_string(t) + ": " +
             std::to_string(per_stim[t]) + " trials, expected " +
             std::to_string(manifest.blocks_per_subject));
      }
    }
  }
  return report;
}

int window_samples(double length, double sampling_rate) {
  return static_cast<int>(std::lround(length * sampling_rate));
}

Epoch epoch_window(const Epoch& epoch, const WindowSpec& window) {
  if (window.start_offset < 0.0 || !(window.length > 0.0)) {
    throw Error("window-out-of-range",
                "window needs start_offset >= 0 and length > 0");
  }
  const long start = epoch.onset + std::lround(window.start_offset * epoch.sampling_rate);
  const long n = window_samples(window.length, epoch.sampling_rate);
  if (n < 1 || start < 0 || start + n > epoch.samples()) {
    std::ostringstream msg;
    msg << "window [" << start << ", " << start + n << ") exceeds epoch of "
        << epoch.samples() << " samples";
    throw Error("window-out-of-range", msg.str());
  }
  Epoch out = epoch;
  out.data = epoch.data.middleCols(start, n);
  out.onset = 0;
  return out;
}

}  // namespace ssvep
