#include "ssvep/lst.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "ssvep/error.hpp"

namespace ssvep {

LstMatrix lst_solve(const Matrix& target, const Matrix& source) {
  if (target.cols() != source.cols()) {
    throw Error("dim-mismatch", "lst_solve: target has " + std::to_string(target.cols()) +
                                    " samples, source has " + std::to_string(source.cols()));
  }
  if (source.size() == 0 || source.cwiseAbs().maxCoeff() == 0.0) {
    throw Error("degenerate-input", "lst_solve: source matrix is all zero");
  }
  const Eigen::Index d = source.rows();

  double cond = std::numeric_limits<double>::infinity();
  if (source.cols() >= d) {
    Eigen::JacobiSVD<Matrix> svd(source);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin > 0.0) cond = (sv(0) / smin) * (sv(0) / smin);
  }

  LstMatrix out;
  if (cond <= kRidgeConditionLimit) {
    const Matrix st = source.transpose();
    out.data = st.colPivHouseholderQr().solve(target.transpose()).transpose();
  } else {
    Matrix gram = source * source.transpose();
    const double eps = kRidgeScale * gram.trace() / static_cast<double>(d);
    gram.diagonal().array() += eps;
    const auto ridge = gram.ldlt();
    out.data = ridge.solve(source * target.transpose()).transpose();
    // iterated Tikhonov: removes the ridge bias on the well-determined subspace
    // while null-space components stay at zero
    for (int k = 0; k < kRidgeRefinements; ++k) {
      const Matrix residual = target - out.data * source;
      out.data += ridge.solve(source * residual.transpose()).transpose();
    }
  }
  return out;
}

Matrix class_mean(std::span<const Matrix> trials) {
  if (trials.empty()) throw Error("missing-class", "class_mean of no trials");
  Matrix mean = trials.front();
  for (std::size_t i = 1; i < trials.size(); ++i) {
    if (trials[i].rows() != mean.rows() || trials[i].cols() != mean.cols()) {
      throw Error("dim-mismatch", "trials of one class differ in shape");
    }
    mean += trials[i];
  }
  mean /= static_cast<double>(trials.size());
  return mean;
}

std::vector<LstMatrix> estimate_stimulus_transforms(const TrialsByClass& trials,
                                                    std::span<const ReferenceTemplate> refs) {
  if (trials.size() != refs.size()) {
    throw Error("dim-mismatch", "need one trial list per reference template");
  }
  std::vector<LstMatrix> transforms;
  transforms.reserve(trials.size());
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].empty()) {
      throw Error("missing-class", "stimulus " + std::to_string(t) + " has no trials");
    }
    const Matrix mean = class_mean(trials[t]);
    if (mean.cols() != refs[t].data.cols()) {
      throw Error("dim-mismatch", "stimulus " + std::to_string(t) +
                                      ": trial and template sample counts differ");
    }
    LstMatrix p = lst_solve(refs[t].data, mean);
    p.stimulus = static_cast<int>(t);
    transforms.push_back(std::move(p));
  }
  return transforms;
}

TransformStack mlst_transform(const Matrix& trial, std::span<const LstMatrix> transforms) {
  TransformStack stack;
  stack.transforms.assign(transforms.begin(), transforms.end());
  stack.transformed.reserve(transforms.size());
  for (const auto& p : transforms) {
    if (p.source_dim() != trial.rows()) {
      throw Error("dim-mismatch", "transform expects " + std::to_string(p.source_dim()) +
                                      " channels, trial has " + std::to_string(trial.rows()));
    }
    stack.transformed.push_back(p.data * trial);
  }
  return stack;
}

TransformStack mlst_transform(const Epoch& trial, std::span<const LstMatrix> transforms) {
  return mlst_transform(trial.data, transforms);
}

SameResult same_augment(const TrialsByClass& calibration,
                        std::span<const ReferenceTemplate> refs, const SameOptions& options) {
  if (options.n_aug < 1) throw Error("invalid-argument", "same_augment needs n_aug >= 1");
  if (options.noise_level < 0.0) throw Error("invalid-argument", "noise_level must be >= 0");
  if (calibration.size() != refs.size()) {
    throw Error("dim-mismatch", "need one calibration list per reference template");
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SameResult result;
  result.artificial.resize(calibration.size());
  for (std::size_t t = 0; t < calibration.size(); ++t) {
    if (calibration[t].empty()) {
      throw Error("missing-class", "stimulus " + std::to_string(t) + " has no calibration trial");
    }
    const Matrix mean = class_mean(calibration[t]);
    const Matrix& y = refs[t].data;
    AliasingMatrix a{lst_solve(mean, y).data, static_cast<int>(t)};
    const Matrix recon = a.data * y;

    const Eigen::Index n = recon.cols();
    Vector sigma(recon.rows());
    for (Eigen::Index c = 0; c < recon.rows(); ++c) {
      const double mu = recon.row(c).mean();
      const double var = (recon.row(c).array() - mu).square().sum() / static_cast<double>(n);
      sigma(c) = options.noise_level * std::sqrt(var);
    }
    for (int k = 0; k < options.n_aug; ++k) {
      Matrix trial = recon;
      if (options.noise_level > 0.0) {
        for (Eigen::Index c = 0; c < trial.rows(); ++c) {
          for (Eigen::Index i = 0; i < n; ++i) trial(c, i) += sigma(c) * normal(rng);
        }
      }
      result.artificial[t].push_back(std::move(trial));
    }
    result.aliasing.push_back(std::move(a));
  }
  return result;
}

}  // namespace ssvep
