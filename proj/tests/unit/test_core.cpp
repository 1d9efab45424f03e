#include <doctest.h>

#include <cmath>
#include <limits>

#include "helpers.hpp"
#include "ssvep/error.hpp"

using namespace ssvep;
using testing::error_code_of;

namespace {

DatasetManifest make_manifest(int subjects, int stimuli, int blocks, int channels, int samples) {
  DatasetManifest m;
  m.name = "grid";
  m.sampling_rate = 256.0;
  for (int s = 0; s < subjects; ++s) m.subjects.push_back({"S" + std::to_string(s + 1), "", 0});
  for (int t = 0; t < stimuli; ++t) m.stimuli.push_back({t, 9.25 + 0.5 * t, 0.0});
  m.blocks_per_subject = blocks;
  for (int c = 0; c < channels; ++c) m.channel_names.push_back("C" + std::to_string(c));
  m.calibration_stimuli = stimuli;
  m.trials_per_stimulus = blocks;
  m.samples_per_epoch = samples;
  return m;
}

std::vector<Epoch> make_epochs(const DatasetManifest& m) {
  std::vector<Epoch> out;
  for (int s = 0; s < m.n_subjects(); ++s) {
    for (int b = 0; b < m.blocks_per_subject; ++b) {
      for (int t = 0; t < m.n_stimuli(); ++t) {
        Epoch e;
        e.data = Matrix::Zero(m.n_channels(), m.samples_per_epoch);
        e.sampling_rate = m.sampling_rate;
        e.stimulus = t;
        e.subject = s;
        e.block = b;
        out.push_back(std::move(e));
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("core") {
  TEST_CASE("consistent 10 x 12 x 15 grid passes validation") {
    const auto m = make_manifest(10, 12, 15, 8, 16);
    const auto epochs = make_epochs(m);
    const auto r = validate_dataset(m, epochs);
    CHECK(r.passed);
    CHECK(r.problems.empty());
    REQUIRE(r.counts.size() == 10);
    for (const auto& [id, counts] : r.counts) {
      REQUIRE(counts.size() == 12);
      for (int c : counts) CHECK(c == 15);
    }
  }

  TEST_CASE("empty epoch collection fails with 'no epochs'") {
    const auto m = make_manifest(2, 3, 2, 2, 8);
    const auto r = validate_dataset(m, {});
    CHECK_FALSE(r.passed);
    REQUIRE(r.problems.size() == 1);
    CHECK(r.problems[0] == "no epochs");
  }

  TEST_CASE("a NaN sample fails and names subject and block") {
    const auto m = make_manifest(3, 4, 3, 2, 8);
    auto epochs = make_epochs(m);
    auto& bad = epochs[static_cast<std::size_t>(1 * 12 + 2 * 4 + 1)];  // subject S2, block 2
    bad.data(1, 3) = std::numeric_limits<double>::quiet_NaN();
    const auto r = validate_dataset(m, epochs);
    CHECK_FALSE(r.passed);
    REQUIRE(r.problems.size() == 1);
    CHECK(r.problems[0].find("subject S2") != std::string::npos);
    CHECK(r.problems[0].find("block 2") != std::string::npos);
    CHECK(r.problems[0].find("non-finite") != std::string::npos);
  }

  TEST_CASE("dimension mismatch, duplicate trial and K != N_f are reported") {
    auto m = make_manifest(2, 3, 2, 2, 8);
    auto epochs = make_epochs(m);
    epochs[0].data = Matrix::Zero(3, 8);
    CHECK_FALSE(validate_dataset(m, epochs).passed);

    epochs = make_epochs(m);
    epochs[1].stimulus = 0;  // two trials for (S1, block 0, stimulus 0)
    CHECK_FALSE(validate_dataset(m, epochs).passed);

    epochs = make_epochs(m);
    m.calibration_stimuli = 2;
    const auto r = validate_dataset(m, epochs);
    CHECK_FALSE(r.passed);
    CHECK(r.problems[0].find("K = N_f") != std::string::npos);
  }

  TEST_CASE("UCSD-style epoch: onset 39, 0.135 s latency, 1.0 s window -> 256 samples") {
    Epoch e;
    e.sampling_rate = 256.0;
    e.onset = 39;
    e.data = Matrix(2, 1114);
    for (Eigen::Index j = 0; j < e.data.cols(); ++j) e.data.col(j).setConstant(static_cast<double>(j));
    const Epoch w = epoch_window(e, {0.135, 1.0});
    CHECK(w.samples() == 256);
    CHECK(w.channels() == 2);
    CHECK(w.onset == 0);
    CHECK(w.data(0, 0) == doctest::Approx(39 + std::lround(0.135 * 256)));
    CHECK(w.sampling_rate == 256.0);
  }

  TEST_CASE("full-length window at offset 0 is an identity slice; re-windowing is idempotent") {
    Epoch e;
    e.sampling_rate = 250.0;
    e.onset = 50;
    e.stimulus = 3;
    e.subject = 2;
    e.block = 1;
    e.data = testing::gaussian(3, 300, 1);
    const Epoch w = epoch_window(e, {0.0, 1.0});
    CHECK(w.data == e.data.rightCols(250));
    CHECK(w.stimulus == 3);
    CHECK(w.subject == 2);
    CHECK(w.block == 1);
    const Epoch again = epoch_window(w, {0.0, 1.0});
    CHECK(again.data == w.data);
  }

  TEST_CASE("offset beyond the epoch end -> window-out-of-range") {
    Epoch e;
    e.sampling_rate = 250.0;
    e.data = Matrix::Zero(2, 250);
    CHECK(error_code_of([&] { epoch_window(e, {1.2, 0.5}); }) == "window-out-of-range");
    CHECK(error_code_of([&] { epoch_window(e, {0.0, 1.1}); }) == "window-out-of-range");
    CHECK(error_code_of([&] { epoch_window(e, {-0.1, 0.5}); }) == "window-out-of-range");
  }

  TEST_CASE("window sample count equals round(length * f_s) on the 0.5-1.0 s grid") {
    for (double fs : {250.0, 256.0}) {
      Epoch e;
      e.sampling_rate = fs;
      e.data = Matrix::Zero(1, 400);
      for (int k = 0; k <= 5; ++k) {
        const double len = 0.5 + 0.1 * k;
        const auto expected = std::lround(len * fs);
        CHECK(epoch_window(e, {0.0, len}).samples() == expected);
        CHECK(window_samples(len, fs) == expected);
      }
    }
  }

  TEST_CASE("stimulus validation") {
    std::vector<StimulusSpec> ok{{0, 8.0, 0.0}, {1, 9.0, 1.0}};
    CHECK_NOTHROW(validate_stimuli(ok));
    std::vector<StimulusSpec> one{{0, 8.0, 0.0}};
    CHECK(error_code_of([&] { validate_stimuli(one); }) == "invalid-stimuli");
    std::vector<StimulusSpec> gap{{0, 8.0, 0.0}, {2, 9.0, 0.0}};
    CHECK(error_code_of([&] { validate_stimuli(gap); }) == "invalid-stimuli");
    std::vector<StimulusSpec> neg{{0, 8.0, 0.0}, {1, -9.0, 0.0}};
    CHECK(error_code_of([&] { validate_stimuli(neg); }) == "invalid-stimuli");
  }
}
