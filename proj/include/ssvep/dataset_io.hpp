#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssvep/core.hpp"

namespace ssvep {

// On-disk layout: `manifest.json` plus one binary file per subject. Each binary
// file is a 24-byte header (magic "SSVP", u32 version, four u32 dims) followed
// by little-endian f32 values, row-major over [block][stimulus][channel][sample].
inline constexpr std::array<char, 4> kMagic{'S', 'S', 'V', 'P'};
inline constexpr std::uint32_t kFormatVersion = 1;

struct Dataset {
  DatasetManifest manifest;
  std::vector<Epoch> epochs;
};

struct TensorHeader {
  std::uint32_t version = kFormatVersion;
  std::array<std::uint32_t, 4> dims{};
};

nlohmann::json manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);

// Flat f32 tensor with the 24-byte header. Throws "io-failure" / "bad-format".
void write_tensor_file(const std::filesystem::path& path,
                       const std::array<std::uint32_t, 4>& dims,
                       const std::vector<float>& values);
std::vector<float> read_tensor_file(const std::filesystem::path& path,
                                    TensorHeader* header = nullptr);

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace ssvep
