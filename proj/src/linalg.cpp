#include "ssvep/linalg.hpp"

#include <cmath>

#include "ssvep/error.hpp"

namespace ssvep {

Matrix center_rows(const Matrix& x) {
  return x.colwise() - x.rowwise().mean();
}

double pearson(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("dim-mismatch", "pearson: operands differ in shape");
  }
  const auto n = static_cast<double>(a.size());
  const double ma = a.sum() / n;
  const double mb = b.sum() / n;
  const auto da = a.array() - ma;
  const auto db = b.array() - mb;
  const double sab = (da * db).sum();
  const double saa = da.square().sum();
  const double sbb = db.square().sum();
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

GeneralizedEigen generalized_symmetric_eig(const Matrix& a, const Matrix& b,
                                           double fallback_ridge) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) {
    throw Error("dim-mismatch", "generalized eigenproblem needs square matrices of equal size");
  }
  const Matrix bs = 0.5 * (b + b.transpose());
  Eigen::LLT<Matrix> llt(bs);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-15)) {
    const double tr = bs.trace();
    if (fallback_ridge <= 0.0 || !(tr > 0.0)) {
      throw Error("eigen-failure", "right-hand matrix is not positive definite");
    }
    Matrix reg = bs;
    reg.diagonal().array() += fallback_ridge * tr / static_cast<double>(n);
    llt.compute(reg);
    if (llt.info() != Eigen::Success) {
      throw Error("eigen-failure", "right-hand matrix singular after regularisation");
    }
  }
  const Matrix l_inv = llt.matrixL().solve(Matrix::Identity(n, n));
  Matrix c = l_inv * a * l_inv.transpose();
  c = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success) throw Error("eigen-failure", "eigen decomposition failed");

  GeneralizedEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors = l_inv.transpose() * es.eigenvectors().rowwise().reverse();
  return out;
}

}  // namespace ssvep
