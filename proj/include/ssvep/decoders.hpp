#pragma once

#include <span>
#include <string>
#include <vector>

#include "ssvep/core.hpp"
#include "ssvep/filterbank.hpp"
#include "ssvep/lst.hpp"
#include "ssvep/reference.hpp"

namespace ssvep {

// Per-class decision scores; the common currency for fusion.
struct ScoreVector {
  Vector scores;
  std::string decoder;

  int argmax() const;  // lowest index wins ties
};

// [class][trial] -> one matrix per filter-bank band.
using BandTrialsByClass = std::vector<std::vector<BandStack>>;

// Regroups [class][trial][band] as one TrialsByClass per band.
std::vector<TrialsByClass> split_bands(const BandTrialsByClass& trials);

// ---------------------------------------------------------------- CCA

struct CcaResult {
  Vector correlations;  // descending
  Matrix x_weights;     // a x n_comp
  Matrix y_weights;     // b x n_comp
};

inline constexpr double kCcaRidge = 1e-9;

// Canonical correlations of the rows of x (a x N) and y (b x N). Auto-covariances
// are regularised with 1e-9 * trace only when a Cholesky factorisation fails or
// is numerically singular. Throws "rank-deficient-input", "invalid-argument".
CcaResult cca_correlations(const Matrix& x, const Matrix& y, int n_comp);

// score[t] = sum_m w_m * rho_{m,t}^2 with rho the first canonical correlation.
ScoreVector fbcca_score(const BandStack& bands, std::span<const ReferenceTemplate> refs,
                        std::span<const double> weights);

// --------------------------------------------------------------- TRCA

struct TrcaBandModel {
  Matrix filters;                // N_f x N_c, row t = unit-norm w_t
  std::vector<Matrix> templates; // per class mean, N_c x N_s
  Vector eigenvalues;            // leading eigenvalue per class
};

struct TrcaModel {
  std::vector<TrcaBandModel> bands;
};

struct TrcaScatter {
  Matrix s;  // sum over distinct trial pairs of X_i X_j^T
  Matrix q;  // covariance of the concatenated trials
};

// Trials are channel-wise mean centred first.
TrcaScatter trca_scatter(std::span<const Matrix> trials);

// Throws "insufficient-trials" when a class has fewer than two trials.
TrcaBandModel trca_train_band(const TrialsByClass& trials);
TrcaModel trca_train(const BandTrialsByClass& trials);

// score[t] = sum_m w_m * pearson(W x_m, W template_{t,m}).
ScoreVector etrca_score(const BandStack& bands, const TrcaModel& model,
                        std::span<const double> weights);

// --------------------------------------------------------------- TDCA

struct TdcaOptions {
  int delays = 5;
  int n_comp = 8;
  bool reference_projection = true;
};

inline constexpr double kTdcaRidge = 1e-6;

struct TdcaBandModel {
  Matrix directions;              // augmented dim x n_comp, orthonormal columns
  std::vector<Matrix> centers;    // per class, n_comp x feature length
  std::vector<Matrix> projectors; // per class, orthonormal basis of span(Y_t^T)
  Vector eigenvalues;
};

struct TdcaModel {
  TdcaOptions options;
  int samples = 0;  // N_s the model was trained on
  std::vector<TdcaBandModel> bands;
};

// Stacks the trial advanced by 0..delays samples (common length N_s - delays)
// and, if `projector` is non-null, appends its projection onto the reference
// subspace column-wise.
Matrix tdca_augment(const Matrix& trial, int delays, const Matrix* projector);

// Orthonormal basis of the row space of the first `length` reference samples.
Matrix reference_projector(const ReferenceTemplate& ref, Eigen::Index length);

struct TdcaScatter {
  Matrix between;
  Matrix within;
  std::vector<Matrix> class_means;  // augmented
};

TdcaScatter tdca_scatter(const TrialsByClass& trials, const TdcaOptions& options,
                         std::span<const Matrix> projectors);

// Throws "insufficient-trials", "degenerate-scatter", "invalid-argument".
TdcaBandModel tdca_train_band(const TrialsByClass& trials,
                              std::span<const ReferenceTemplate> refs,
                              const TdcaOptions& options);
TdcaModel tdca_train(const BandTrialsByClass& trials, std::span<const ReferenceTemplate> refs,
                     const TdcaOptions& options);

ScoreVector tdca_score(const BandStack& bands, const TdcaModel& model,
                       std::span<const double> weights);

}  // namespace ssvep
