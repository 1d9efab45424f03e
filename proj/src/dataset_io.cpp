#include "ssvep/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "ssvep/error.hpp"

namespace ssvep {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void put(std::ostream& os, T v) {
  v = to_little(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return to_little(v);
}

}  // namespace

json manifest_to_json(const DatasetManifest& m) {
  json stimuli = json::array();
  for (const auto& s : m.stimuli) {
    stimuli.push_back({{"index", s.index}, {"frequency", s.frequency}, {"phase", s.phase}});
  }
  json subjects = json::array();
  for (const auto& s : m.subjects) {
    json e{{"id", s.id}, {"file", s.file}};
    if (s.samples > 0) e["samples"] = s.samples;
    subjects.push_back(std::move(e));
  }
  return json{{"name", m.name},
              {"format_version", kFormatVersion},
              {"sampling_rate", m.sampling_rate},
              {"subjects", subjects},
              {"stimuli", stimuli},
              {"blocks_per_subject", m.blocks_per_subject},
              {"channel_names", m.channel_names},
              {"latency_offset", m.latency_offset},
              {"cue_offset", m.cue_offset},
              {"K", m.calibration_stimuli},
              {"N_trial", m.trials_per_stimulus},
              {"samples_per_epoch", m.samples_per_epoch}};
}

DatasetManifest manifest_from_json(const json& j) {
  DatasetManifest m;
  try {
    m.name = j.value("name", std::string{});
    m.sampling_rate = j.at("sampling_rate").get<double>();
    for (const auto& s : j.at("subjects")) {
      m.subjects.push_back({s.at("id").get<std::string>(),
                            s.at("file").get<std::string>(),
                            s.value("samples", 0)});
    }
    for (const auto& s : j.at("stimuli")) {
      m.stimuli.push_back({s.at("index").get<int>(), s.at("frequency").get<double>(),
                           s.value("phase", 0.0)});
    }
    m.blocks_per_subject = j.at("blocks_per_subject").get<int>();
    m.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    m.latency_offset = j.value("latency_offset", 0.0);
    m.cue_offset = j.value("cue_offset", 0.0);
    m.calibration_stimuli = j.value("K", static_cast<int>(m.stimuli.size()));
    m.trials_per_stimulus = j.value("N_trial", 0);
    m.samples_per_epoch = j.at("samples_per_epoch").get<int>();
  } catch (const json::exception& e) {
    throw Error("bad-format", std::string("manifest: ") + e.what());
  }
  validate_stimuli(m.stimuli);
  return m;
}

void write_tensor_file(const fs::path& path, const std::array<std::uint32_t, 4>& dims,
                       const std::vector<float>& values) {
  std::size_t expected = 1;
  for (auto d : dims) expected *= d;
  if (expected != values.size()) {
    throw Error("dim-mismatch", "tensor dims do not match value count for " + path.string());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("io-failure", "cannot open " + tmp.string());
    os.write(kMagic.data(), kMagic.size());
    put(os, kFormatVersion);
    for (auto d : dims) put(os, d);
    if constexpr (std::endian::native == std::endian::little) {
      os.write(reinterpret_cast<const char*>(values.data()),
               static_cast<std::streamsize>(values.size() * sizeof(float)));
    } else {
      for (float v : values) put(os, v);
    }
    if (!os) throw Error("io-failure", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error("io-failure", "cannot rename " + tmp.string() + ": " + ec.message());
}

std::vector<float> read_tensor_file(const fs::path& path, TensorHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("missing-file", "cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error("bad-format", "bad magic in " + path.string());
  TensorHeader h;
  h.version = get<std::uint32_t>(is);
  if (h.version != kFormatVersion) {
    throw Error("bad-format", "unsupported format version " + std::to_string(h.version) +
                                  " in " + path.string());
  }
  std::size_t count = 1;
  for (auto& d : h.dims) {
    d = get<std::uint32_t>(is);
    count *= d;
  }
  if (!is) throw Error("bad-format", "truncated header in " + path.string());
  std::vector<float> values(count);
  is.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(float)));
  if (static_cast<std::size_t>(is.gcount()) != count * sizeof(float)) {
    throw Error("bad-format", "truncated payload in " + path.string());
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (auto& v : values) v = to_little(v);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw Error("bad-format", "trailing bytes in " + path.string());
  }
  if (header) *header = h;
  return values;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  const auto& m = dataset.manifest;
  fs::create_directories(dir);
  const auto n_b = static_cast<std::size_t>(m.blocks_per_subject);
  const auto n_f = static_cast<std::size_t>(m.n_stimuli());
  const auto n_c = static_cast<std::size_t>(m.n_channels());

  for (int s = 0; s < m.n_subjects(); ++s) {
    const auto n_s = static_cast<std::size_t>(m.samples_for(s));
    std::vector<float> values(n_b * n_f * n_c * n_s, 0.0f);
    std::vector<char> seen(n_b * n_f, 0);
    for (const auto& e : dataset.epochs) {
      if (e.subject != s) continue;
      if (e.stimulus < 0 || static_cast<std::size_t>(e.stimulus) >= n_f || e.block < 0 ||
          static_cast<std::size_t>(e.block) >= n_b ||
          static_cast<std::size_t>(e.channels()) != n_c ||
          static_cast<std::size_t>(e.samples()) != n_s) {
        throw Error("dim-mismatch", "epoch of subject " + m.subjects[static_cast<std::size_t>(s)].id +
                                        " does not fit the manifest layout");
      }
      const std::size_t cell = static_cast<std::size_t>(e.block) * n_f + static_cast<std::size_t>(e.stimulus);
      seen[cell] = 1;
      float* dst = values.data() + cell * n_c * n_s;
      for (std::size_t c = 0; c < n_c; ++c) {
        for (std::size_t k = 0; k < n_s; ++k) {
          dst[c * n_s + k] = static_cast<float>(e.data(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)));
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error("dim-mismatch", "subject " + m.subjects[static_cast<std::size_t>(s)].id +
                                      " is missing trials for the block x stimulus grid");
    }
    write_tensor_file(dir / m.subjects[static_cast<std::size_t>(s)].file,
                      {static_cast<std::uint32_t>(n_b), static_cast<std::uint32_t>(n_f),
                       static_cast<std::uint32_t>(n_c), static_cast<std::uint32_t>(n_s)},
                      values);
  }

  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw Error("io-failure", "cannot write manifest in " + dir.string());
    os << manifest_to_json(m).dump(2) << '\n';
  }
  fs::rename(tmp, dir / "manifest.json");
}

Dataset load_dataset(const fs::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw Error("missing-file", "cannot open " + (dir / "manifest.json").string());
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw Error("bad-format", std::string("manifest.json: ") + e.what());
  }
  Dataset ds;
  ds.manifest = manifest_from_json(j);
  const auto& m = ds.manifest;
  const int onset = m.onset_sample();

  for (int s = 0; s < m.n_subjects(); ++s) {
    TensorHeader h;
    const auto values = read_tensor_file(dir / m.subjects[static_cast<std::size_t>(s)].file, &h);
    const std::array<std::uint32_t, 4> want{
        static_cast<std::uint32_t>(m.blocks_per_subject), static_cast<std::uint32_t>(m.n_stimuli()),
        static_cast<std::uint32_t>(m.n_channels()), static_cast<std::uint32_t>(m.samples_for(s))};
    if (h.dims != want) {
      throw Error("dim-mismatch", "subject " + m.subjects[static_cast<std::size_t>(s)].id +
                                      ": binary dims disagree with manifest");
    }
    const auto [n_b, n_f, n_c, n_s] = want;
    for (std::uint32_t b = 0; b < n_b; ++b) {
      for (std::uint32_t t = 0; t < n_f; ++t) {
        Epoch e;
        e.data.resize(n_c, n_s);
        const float* src = values.data() + (static_cast<std::size_t>(b) * n_f + t) * n_c * n_s;
        for (std::uint32_t c = 0; c < n_c; ++c) {
          for (std::uint32_t k = 0; k < n_s; ++k) {
            e.data(c, k) = src[static_cast<std::size_t>(c) * n_s + k];
          }
        }
        e.sampling_rate = m.sampling_rate;
        e.stimulus = static_cast<int>(t);
        e.subject = s;
        e.block = static_cast<int>(b);
        e.onset = onset;
        ds.epochs.push_back(std::move(e));
      }
    }
  }
  return ds;
}

}  // namespace ssvep
