#include "ssvep/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssvep/dataset_io.hpp"
#include "ssvep/error.hpp"

namespace ssvep {

std::uint64_t config_hash(const NetConfig& cfg) {
  const std::string text = net_config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("io-failure", "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("io-failure", "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("io-failure", "cannot rename to " + path.string());
}

namespace {

std::filesystem::path with_ext(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void save_net_params(const NetParams& params, const std::filesystem::path& stem) {
  nlohmann::json header;
  header["config"] = net_config_to_json(params.cfg);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(params.cfg)));
  header["config_hash"] = hash;
  header["parameters"] = params.size();
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& e : params.layout) {
    layers.push_back({{"name", e.name}, {"shape", {e.rows, e.cols}}, {"offset", e.offset}});
  }
  header["layers"] = layers;
  std::vector<float> values(static_cast<std::size_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    values[static_cast<std::size_t>(i)] = static_cast<float>(params.values[i]);
  }
  write_tensor_file(with_ext(stem, ".bin"),
                    {1u, 1u, 1u, static_cast<std::uint32_t>(params.size())}, values);
  write_text_file(with_ext(stem, ".json"), header.dump(2) + "\n");
}

NetParams load_net_params(const std::filesystem::path& stem) {
  const auto json_path = with_ext(stem, ".json");
  std::ifstream in(json_path);
  if (!in) throw Error("missing-file", "cannot open " + json_path.string());
  nlohmann::json header;
  try {
    in >> header;
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-format", json_path.string() + ": " + e.what());
  }
  NetParams p = net_init(net_config_from_json(header.at("config")));
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(p.cfg)));
  if (header.value("config_hash", std::string()) != hash) {
    throw Error("config-mismatch", "config hash differs in " + json_path.string());
  }
  const auto values = read_tensor_file(with_ext(stem, ".bin"));
  if (static_cast<Eigen::Index>(values.size()) != p.size()) {
    throw Error("config-mismatch", "parameter count differs from config");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) p.values[i] = values[static_cast<std::size_t>(i)];
  return p;
}

void write_loss_history(std::span<const double> history, const std::filesystem::path& path) {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,loss\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << history[i] << '\n';
  write_text_file(path, os.str());
}

nlohmann::json trca_to_json(const TrcaModel& model) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : model.bands) {
    nlohmann::json t = nlohmann::json::array();
    for (const auto& m : b.templates) t.push_back(matrix_json(m));
    bands.push_back({{"filters", matrix_json(b.filters)},
                     {"eigenvalues", std::vector<double>(b.eigenvalues.data(),
                                                         b.eigenvalues.data() + b.eigenvalues.size())},
                     {"templates", t}});
  }
  return {{"decoder", "etrca"}, {"bands", bands}};
}

nlohmann::json tdca_to_json(const TdcaModel& model) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : model.bands) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& m : b.centers) c.push_back(matrix_json(m));
    bands.push_back({{"directions", matrix_json(b.directions)}, {"centers", c}});
  }
  return {{"decoder", "tdca"},
          {"delays", model.options.delays},
          {"n_comp", model.options.n_comp},
          {"reference_projection", model.options.reference_projection},
          {"samples", model.samples},
          {"bands", bands}};
}

}  // namespace ssvep
