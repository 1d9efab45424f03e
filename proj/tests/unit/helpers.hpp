#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "ssvep/core.hpp"
#include "ssvep/error.hpp"

namespace testing {

inline ssvep::Matrix gaussian(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  ssvep::Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

inline double rel_err(const ssvep::Matrix& a, const ssvep::Matrix& b) {
  return (a - b).norm() / b.norm();
}

// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("ssvep_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

template <class F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const ssvep::Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace testing
