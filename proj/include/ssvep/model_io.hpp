#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "ssvep/decoders.hpp"
#include "ssvep/net.hpp"

namespace ssvep {

// FNV-1a over the compact JSON dump of the config; ties a params file to the
// architecture it was trained for.
std::uint64_t config_hash(const NetConfig& cfg);

// Writes `<stem>.json` (config, hash, layer names and shapes) and `<stem>.bin`
// (flat f32 tensor, dims {1, 1, 1, P}). Throws "io-failure".
void save_net_params(const NetParams& params, const std::filesystem::path& stem);
// Throws "missing-file", "bad-format", "config-mismatch".
NetParams load_net_params(const std::filesystem::path& stem);

// epoch,loss
void write_loss_history(std::span<const double> history, const std::filesystem::path& path);

nlohmann::json trca_to_json(const TrcaModel& model);
nlohmann::json tdca_to_json(const TdcaModel& model);

// Writes text atomically (temp file then rename). Throws "io-failure".
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ssvep
