#include "ssvep/decoders.hpp"

#include <algorithm>
#include <cmath>

#include "ssvep/error.hpp"
#include "ssvep/linalg.hpp"

namespace ssvep {

int ScoreVector::argmax() const {
  if (scores.size() == 0) throw Error("dim-mismatch", "empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best)) best = i;
  }
  return static_cast<int>(best);
}

std::vector<TrialsByClass> split_bands(const BandTrialsByClass& trials) {
  std::size_t n_bands = 0;
  for (const auto& cls : trials) {
    for (const auto& trial : cls) {
      if (n_bands == 0) n_bands = trial.size();
      if (trial.size() != n_bands) {
        throw Error("dim-mismatch", "trials disagree on the number of bands");
      }
    }
  }
  std::vector<TrialsByClass> out(n_bands, TrialsByClass(trials.size()));
  for (std::size_t t = 0; t < trials.size(); ++t) {
    for (const auto& trial : trials[t]) {
      for (std::size_t m = 0; m < n_bands; ++m) out[m][t].push_back(trial[m]);
    }
  }
  return out;
}

namespace {

void check_weights(std::size_t n_bands, std::span<const double> weights) {
  if (weights.size() != n_bands) {
    throw Error("dim-mismatch", "expected " + std::to_string(n_bands) + " band weights, got " +
                                    std::to_string(weights.size()));
  }
}

// Cholesky factor of an auto-covariance, ridged only when needed.
Eigen::LLT<Matrix> factor_autocov(Matrix c) {
  Eigen::LLT<Matrix> llt(c);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-14) return llt;
  const double tr = c.trace();
  if (!(tr > 0.0)) throw Error("rank-deficient-input", "CCA input has zero variance");
  c.diagonal().array() += kCcaRidge * tr;
  llt.compute(c);
  if (llt.info() != Eigen::Success) {
    throw Error("rank-deficient-input", "CCA auto-covariance singular after regularisation");
  }
  return llt;
}

void fix_sign(Eigen::Ref<Vector> w) {
  Eigen::Index idx = 0;
  w.cwiseAbs().maxCoeff(&idx);
  if (w(idx) < 0.0) w = -w;
}

}  // namespace

CcaResult cca_correlations(const Matrix& x, const Matrix& y, int n_comp) {
  if (x.cols() != y.cols()) throw Error("dim-mismatch", "CCA operands differ in sample count");
  const Eigen::Index a = x.rows();
  const Eigen::Index b = y.rows();
  if (!(x.cols() > a + b)) {
    throw Error("invalid-argument", "CCA needs more samples than a + b");
  }
  if (n_comp < 1 || n_comp > std::min(a, b)) {
    throw Error("invalid-argument", "CCA n_comp must lie in [1, min(a, b)]");
  }
  const double inv_n = 1.0 / static_cast<double>(x.cols());
  const Matrix xc = center_rows(x);
  const Matrix yc = center_rows(y);
  const auto lx = factor_autocov(xc * xc.transpose() * inv_n);
  const auto ly = factor_autocov(yc * yc.transpose() * inv_n);
  const Matrix cxy = xc * yc.transpose() * inv_n;

  // Lx^-1 Cxy Ly^-T
  Matrix m = lx.matrixL().solve(cxy);
  m = ly.matrixL().solve(m.transpose()).transpose();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

  CcaResult out;
  out.correlations = svd.singularValues().head(n_comp);
  out.x_weights = lx.matrixU().solve(Matrix(svd.matrixU().leftCols(n_comp)));
  out.y_weights = ly.matrixU().solve(Matrix(svd.matrixV().leftCols(n_comp)));
  return out;
}

ScoreVector fbcca_score(const BandStack& bands, std::span<const ReferenceTemplate> refs,
                        std::span<const double> weights) {
  check_weights(bands.size(), weights);
  ScoreVector out{Vector::Zero(static_cast<Eigen::Index>(refs.size())), "fbcca"};
  for (std::size_t m = 0; m < bands.size(); ++m) {
    for (std::size_t t = 0; t < refs.size(); ++t) {
      const double rho = cca_correlations(bands[m], refs[t].data, 1).correlations(0);
      out.scores(static_cast<Eigen::Index>(t)) += weights[m] * rho * rho;
    }
  }
  return out;
}

TrcaScatter trca_scatter(std::span<const Matrix> trials) {
  if (trials.empty()) throw Error("insufficient-trials", "no trials");
  const Eigen::Index c = trials.front().rows();
  Matrix sum = Matrix::Zero(c, trials.front().cols());
  TrcaScatter sc{Matrix::Zero(c, c), Matrix::Zero(c, c)};
  for (const auto& tr : trials) {
    const Matrix xc = center_rows(tr);
    sum += xc;
    sc.q += xc * xc.transpose();
  }
  sc.s = sum * sum.transpose() - sc.q;
  sc.s = 0.5 * (sc.s + sc.s.transpose());
  return sc;
}

TrcaBandModel trca_train_band(const TrialsByClass& trials) {
  if (trials.empty()) throw Error("insufficient-trials", "no classes");
  const Eigen::Index n_c = trials.front().empty() ? 0 : trials.front().front().rows();
  TrcaBandModel model;
  model.filters.resize(static_cast<Eigen::Index>(trials.size()), n_c);
  model.eigenvalues.resize(static_cast<Eigen::Index>(trials.size()));
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].size() < 2) {
      throw Error("insufficient-trials", "stimulus " + std::to_string(t) + " has " +
                                             std::to_string(trials[t].size()) +
                                             " trials; TRCA needs at least two");
    }
    for (const auto& tr : trials[t]) {
      if (tr.rows() != n_c) throw Error("dim-mismatch", "trials differ in channel count");
    }
    const auto sc = trca_scatter(trials[t]);
    const auto ge = generalized_symmetric_eig(sc.s, sc.q, 1e-9);
    Vector w = ge.vectors.col(0);
    w.normalize();
    fix_sign(w);
    model.filters.row(static_cast<Eigen::Index>(t)) = w.transpose();
    model.eigenvalues(static_cast<Eigen::Index>(t)) = ge.values(0);
    model.templates.push_back(class_mean(trials[t]));
  }
  return model;
}

TrcaModel trca_train(const BandTrialsByClass& trials) {
  TrcaModel model;
  for (const auto& band : split_bands(trials)) model.bands.push_back(trca_train_band(band));
  return model;
}

ScoreVector etrca_score(const BandStack& bands, const TrcaModel& model,
                        std::span<const double> weights) {
  if (bands.size() != model.bands.size()) {
    throw Error("dim-mismatch", "test trial has " + std::to_string(bands.size()) +
                                    " bands, model has " + std::to_string(model.bands.size()));
  }
  check_weights(bands.size(), weights);
  const auto n_f = static_cast<Eigen::Index>(model.bands.front().templates.size());
  ScoreVector out{Vector::Zero(n_f), "etrca"};
  for (std::size_t m = 0; m < bands.size(); ++m) {
    const auto& bm = model.bands[m];
    if (bands[m].rows() != bm.filters.cols() ||
        bands[m].cols() != bm.templates.front().cols()) {
      throw Error("dim-mismatch", "test trial shape differs from the TRCA templates");
    }
    const Matrix projected = bm.filters * bands[m];
    for (Eigen::Index t = 0; t < n_f; ++t) {
      const Matrix tmpl = bm.filters * bm.templates[static_cast<std::size_t>(t)];
      out.scores(t) += weights[m] * pearson(projected, tmpl);
    }
  }
  return out;
}

Matrix reference_projector(const ReferenceTemplate& ref, Eigen::Index length) {
  if (length > ref.data.cols()) {
    throw Error("dim-mismatch", "reference shorter than the requested projector length");
  }
  const Matrix yt = ref.data.leftCols(length).transpose();
  Eigen::HouseholderQR<Matrix> qr(yt);
  return qr.householderQ() * Matrix::Identity(length, yt.cols());
}

Matrix tdca_augment(const Matrix& trial, int delays, const Matrix* projector) {
  const Eigen::Index n_c = trial.rows();
  const Eigen::Index len = trial.cols() - delays;
  if (delays < 0 || len < 1) throw Error("invalid-argument", "delay count exceeds trial length");
  Matrix stacked(n_c * (delays + 1), len);
  for (int j = 0; j <= delays; ++j) {
    stacked.middleRows(j * n_c, n_c) = trial.middleCols(j, len);
  }
  if (projector == nullptr) return stacked;
  if (projector->rows() != len) {
    throw Error("dim-mismatch", "reference projector length differs from the augmented trial");
  }
  Matrix out(stacked.rows(), 2 * len);
  out.leftCols(len) = stacked;
  out.rightCols(len) = (stacked * *projector) * projector->transpose();
  return out;
}

TdcaScatter tdca_scatter(const TrialsByClass& trials, const TdcaOptions& options,
                         std::span<const Matrix> projectors) {
  TdcaScatter sc;
  std::vector<std::vector<Matrix>> augmented(trials.size());
  std::size_t total = 0;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Matrix* proj = options.reference_projection ? &projectors[t] : nullptr;
    for (const auto& tr : trials[t]) {
      augmented[t].push_back(tdca_augment(center_rows(tr), options.delays, proj));
    }
    sc.class_means.push_back(class_mean(augmented[t]));
    total += trials[t].size();
  }
  const Eigen::Index dim = sc.class_means.front().rows();
  Matrix grand = Matrix::Zero(dim, sc.class_means.front().cols());
  for (const auto& m : sc.class_means) grand += m;
  grand /= static_cast<double>(sc.class_means.size());

  sc.between = Matrix::Zero(dim, dim);
  sc.within = Matrix::Zero(dim, dim);
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Matrix d = sc.class_means[t] - grand;
    sc.between += d * d.transpose();
    for (const auto& a : augmented[t]) {
      const Matrix e = a - sc.class_means[t];
      sc.within += e * e.transpose();
    }
  }
  sc.between /= static_cast<double>(trials.size());
  sc.within /= static_cast<double>(total);
  return sc;
}

TdcaBandModel tdca_train_band(const TrialsByClass& trials,
                              std::span<const ReferenceTemplate> refs,
                              const TdcaOptions& options) {
  if (options.delays < 0) throw Error("invalid-argument", "TDCA delay count must be >= 0");
  if (options.n_comp < 1) throw Error("invalid-argument", "TDCA n_comp must be >= 1");
  if (trials.size() < 2) throw Error("insufficient-trials", "TDCA needs at least two classes");
  const Eigen::Index n_s = trials.front().empty() ? 0 : trials.front().front().cols();
  for (std::size_t t = 0; t < trials.size(); ++t) {
    if (trials[t].size() < 2) {
      throw Error("insufficient-trials", "stimulus " + std::to_string(t) + " has " +
                                             std::to_string(trials[t].size()) +
                                             " trials; TDCA needs at least two");
    }
    for (const auto& tr : trials[t]) {
      if (tr.cols() != n_s || tr.rows() != trials.front().front().rows()) {
        throw Error("dim-mismatch", "TDCA trials differ in shape");
      }
    }
  }
  const Eigen::Index len = n_s - options.delays;

  TdcaBandModel model;
  if (options.reference_projection) {
    if (refs.size() != trials.size()) {
      throw Error("dim-mismatch", "TDCA needs one reference per class");
    }
    const Eigen::Index two_h = refs.front().data.rows();
    if (len < two_h) {
      throw Error("invalid-argument", "TDCA needs N_s - delays >= 2 N_h");
    }
    for (const auto& r : refs) model.projectors.push_back(reference_projector(r, len));
  }

  const auto sc = tdca_scatter(trials, options, model.projectors);
  const Eigen::Index dim = sc.within.rows();
  double scale = sc.within.trace();
  if (!(scale > 1e-300)) scale = sc.between.trace();
  if (!(scale > 1e-300)) throw Error("degenerate-scatter", "TDCA scatter matrices are zero");
  Matrix within = sc.within;
  within.diagonal().array() += kTdcaRidge * scale / static_cast<double>(dim);

  const auto ge = generalized_symmetric_eig(sc.between, within);
  const Eigen::Index k = std::min<Eigen::Index>(options.n_comp, dim);
  const Matrix lead = ge.vectors.leftCols(k);
  Eigen::HouseholderQR<Matrix> qr(lead);
  model.directions = qr.householderQ() * Matrix::Identity(dim, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (model.directions.col(j).dot(lead.col(j)) < 0.0) model.directions.col(j) *= -1.0;
  }
  if (!model.directions.allFinite()) {
    throw Error("degenerate-scatter", "TDCA produced non-finite directions");
  }
  model.eigenvalues = ge.values.head(k);
  for (const auto& m : sc.class_means) {
    model.centers.push_back(model.directions.transpose() * m);
  }
  return model;
}

TdcaModel tdca_train(const BandTrialsByClass& trials, std::span<const ReferenceTemplate> refs,
                     const TdcaOptions& options) {
  TdcaModel model;
  model.options = options;
  for (const auto& band : split_bands(trials)) {
    if (model.samples == 0) model.samples = static_cast<int>(band.front().front().cols());
    model.bands.push_back(tdca_train_band(band, refs, options));
  }
  return model;
}

ScoreVector tdca_score(const BandStack& bands, const TdcaModel& model,
                       std::span<const double> weights) {
  if (bands.size() != model.bands.size()) {
    throw Error("dim-mismatch", "test trial has " + std::to_string(bands.size()) +
                                    " bands, model has " + std::to_string(model.bands.size()));
  }
  check_weights(bands.size(), weights);
  const auto n_f = static_cast<Eigen::Index>(model.bands.front().centers.size());
  ScoreVector out{Vector::Zero(n_f), "tdca"};
  for (std::size_t m = 0; m < bands.size(); ++m) {
    const auto& bm = model.bands[m];
    if (bands[m].cols() != model.samples ||
        bands[m].rows() * (model.options.delays + 1) != bm.directions.rows()) {
      throw Error("dim-mismatch", "test trial shape differs from the TDCA model");
    }
    const Matrix centred = center_rows(bands[m]);
    Matrix plain;
    if (!model.options.reference_projection) {
      plain = bm.directions.transpose() * tdca_augment(centred, model.options.delays, nullptr);
    }
    for (Eigen::Index t = 0; t < n_f; ++t) {
      const auto ti = static_cast<std::size_t>(t);
      const double r =
          model.options.reference_projection
              ? pearson(bm.directions.transpose() *
                            tdca_augment(centred, model.options.delays, &bm.projectors[ti]),
                        bm.centers[ti])
              : pearson(plain, bm.centers[ti]);
      out.scores(t) += weights[m] * r;
    }
  }
  return out;
}

}  // namespace ssvep
