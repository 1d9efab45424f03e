#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssvep/core.hpp"
#include "ssvep/reference.hpp"

namespace ssvep {

// Channels -> references: 2N_h x N_c.
struct LstMatrix {
  Matrix data;
  std::optional<int> stimulus;

  Eigen::Index source_dim() const { return data.cols(); }
  Eigen::Index target_dim() const { return data.rows(); }
};

// References -> channels: N_c x 2N_h. Kept distinct from LstMatrix so the two
// orientations cannot be mixed up.
struct AliasingMatrix {
  Matrix data;
  int stimulus = 0;
};

// transformed[t] = transforms[t] * trial, each 2N_h x N_s.
struct TransformStack {
  std::vector<LstMatrix> transforms;
  std::vector<Matrix> transformed;
};

inline constexpr double kRidgeConditionLimit = 1e12;
inline constexpr double kRidgeScale = 1e-8;
inline constexpr int kRidgeRefinements = 2;

// argmin_P ||target - P * source||_F, i.e. target * source^T (source source^T)^-1,
// solved with a pivoted QR of source^T. Falls back to the ridge solution with
// eps = 1e-8 * trace(G) / d when cond(G = source source^T) > 1e12, refined by two
// iterated-Tikhonov steps.
// Throws "degenerate-input" for an all-zero source, "dim-mismatch" when the
// sample counts differ.
LstMatrix lst_solve(const Matrix& target, const Matrix& source);

// Per-class trial list; index = stimulus.
using TrialsByClass = std::vector<std::vector<Matrix>>;

Matrix class_mean(std::span<const Matrix> trials);

// P_t = lst_solve(Y_t, mean of class t). Throws "missing-class".
std::vector<LstMatrix> estimate_stimulus_transforms(const TrialsByClass& trials,
                                                    std::span<const ReferenceTemplate> refs);

// Throws "dim-mismatch" when a transform's source dim differs from N_c.
TransformStack mlst_transform(const Matrix& trial, std::span<const LstMatrix> transforms);
TransformStack mlst_transform(const Epoch& trial, std::span<const LstMatrix> transforms);

struct SameOptions {
  int n_aug = 3;
  double noise_level = 0.05;
  std::uint64_t seed = 0;
};

struct SameResult {
  std::vector<AliasingMatrix> aliasing;  // per stimulus
  TrialsByClass artificial;              // n_aug trials per stimulus
};

// Source aliasing matrix estimation: A_t = lst_solve(mean_t, Y_t), R_t = A_t Y_t,
// artificial = R_t + N(0, (noise_level * std_c(R_t))^2) per channel.
SameResult same_augment(const TrialsByClass& calibration,
                        std::span<const ReferenceTemplate> refs, const SameOptions& options);

}  // namespace ssvep
