#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "ssvep/dataset_io.hpp"
#include "ssvep/synth.hpp"

using namespace ssvep;
using testing::error_code_of;

namespace {

Dataset small_dataset() {
  SynthSpec s;
  s.n_subjects = 2;
  s.n_stimuli = 3;
  s.n_blocks = 2;
  s.n_channels = 4;
  s.post_onset = 0.4;
  return synth_generate(s, 11);
}

}  // namespace

TEST_SUITE("dataset_io") {
  TEST_CASE("save/load round trip is lossless up to f32 rounding") {
    testing::TempDir dir("roundtrip");
    const Dataset ds = small_dataset();
    save_dataset(ds, dir.path);
    CHECK(std::filesystem::exists(dir.path / "manifest.json"));
    CHECK(std::filesystem::exists(dir.path / "S01.bin"));
    const Dataset back = load_dataset(dir.path);
    CHECK(back.manifest.name == ds.manifest.name);
    CHECK(back.manifest.n_subjects() == 2);
    CHECK(back.manifest.n_stimuli() == 3);
    CHECK(back.manifest.cue_offset == doctest::Approx(ds.manifest.cue_offset));
    CHECK(back.manifest.stimuli[2].phase == ds.manifest.stimuli[2].phase);
    REQUIRE(back.epochs.size() == ds.epochs.size());
    for (std::size_t i = 0; i < ds.epochs.size(); ++i) {
      const auto& a = ds.epochs[i];
      const auto* match = &back.epochs[0];
      for (const auto& b : back.epochs) {
        if (b.subject == a.subject && b.block == a.block && b.stimulus == a.stimulus) match = &b;
      }
      CHECK(match->onset == a.onset);
      const Matrix rounded = a.data.cast<float>().cast<double>();
      CHECK((match->data - rounded).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(validate_dataset(back.manifest, back.epochs).passed);
  }

  TEST_CASE("binary layout: 24-byte header then [block][stimulus][channel][sample] f32") {
    testing::TempDir dir("layout");
    const Dataset ds = small_dataset();
    save_dataset(ds, dir.path);
    TensorHeader h;
    const auto values = read_tensor_file(dir.path / "S02.bin", &h);
    CHECK(h.version == kFormatVersion);
    const auto n_s = static_cast<std::uint32_t>(ds.manifest.samples_per_epoch);
    CHECK(h.dims == std::array<std::uint32_t, 4>{2, 3, 4, n_s});
    CHECK(std::filesystem::file_size(dir.path / "S02.bin") == 24 + 4 * values.size());
    // block 1, stimulus 2, channel 3, sample 5 of subject index 1
    const Epoch* e = nullptr;
    for (const auto& x : ds.epochs) {
      if (x.subject == 1 && x.block == 1 && x.stimulus == 2) e = &x;
    }
    REQUIRE(e != nullptr);
    const std::size_t idx = ((1u * 3 + 2) * 4 + 3) * n_s + 5;
    CHECK(values[idx] == static_cast<float>(e->data(3, 5)));
    std::ifstream in(dir.path / "S02.bin", std::ios::binary);
    char magic[4];
    in.read(magic, 4);
    CHECK(std::string(magic, 4) == "SSVP");
  }

  TEST_CASE("missing file, bad magic, trailing bytes and dim mismatch are rejected") {
    testing::TempDir dir("errors");
    CHECK(error_code_of([&] { load_dataset(dir.path); }) == "missing-file");
    CHECK(error_code_of([&] { read_tensor_file(dir.path / "nope.bin"); }) == "missing-file");

    write_tensor_file(dir.path / "t.bin", {1, 1, 2, 3}, std::vector<float>(6, 1.0f));
    CHECK(read_tensor_file(dir.path / "t.bin").size() == 6);
    CHECK_FALSE(std::filesystem::exists(dir.path / "t.bin.tmp"));
    {
      std::ofstream out(dir.path / "t.bin", std::ios::binary | std::ios::app);
      out.put('x');
    }
    CHECK(error_code_of([&] { read_tensor_file(dir.path / "t.bin"); }) == "bad-format");
    {
      std::fstream f(dir.path / "t.bin", std::ios::binary | std::ios::in | std::ios::out);
      f.write("XXXX", 4);
    }
    CHECK(error_code_of([&] { read_tensor_file(dir.path / "t.bin"); }) == "bad-format");
    CHECK(error_code_of([&] {
            write_tensor_file(dir.path / "u.bin", {1, 1, 2, 3}, std::vector<float>(5));
          }) == "dim-mismatch");

    const Dataset ds = small_dataset();
    save_dataset(ds, dir.path / "ds");
    write_tensor_file(dir.path / "ds" / "S01.bin", {2, 3, 4, 7}, std::vector<float>(2 * 3 * 4 * 7));
    CHECK(error_code_of([&] { load_dataset(dir.path / "ds"); }) == "dim-mismatch");
  }

  TEST_CASE("manifest JSON round trip keeps every field") {
    const Dataset ds = small_dataset();
    auto m = ds.manifest;
    m.latency_offset = 0.135;
    m.subjects[1].samples = 99;
    const auto back = manifest_from_json(manifest_to_json(m));
    CHECK(back.latency_offset == 0.135);
    CHECK(back.subjects[1].samples == 99);
    CHECK(back.samples_for(1) == 99);
    CHECK(back.samples_for(0) == m.samples_per_epoch);
    CHECK(back.channel_names == m.channel_names);
    CHECK(back.calibration_stimuli == m.calibration_stimuli);
    CHECK(back.trials_per_stimulus == m.trials_per_stimulus);
    CHECK(manifest_to_json(back).dump() == manifest_to_json(m).dump());
  }
}
