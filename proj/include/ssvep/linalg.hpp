#pragma once

#include "ssvep/core.hpp"

namespace ssvep {

// Removes each row's mean.
Matrix center_rows(const Matrix& x);

// Pearson correlation of two equally shaped matrices, flattened. Returns 0 when
// either side has zero variance.
double pearson(const Matrix& a, const Matrix& b);

struct GeneralizedEigen {
  Vector values;   // descending
  Matrix vectors;  // columns, B-orthonormal
};

// Solves A v = lambda B v for symmetric A and symmetric positive-definite B by
// the Cholesky whitening reduction. If B is not positive definite and
// `fallback_ridge` > 0, retries with B + fallback_ridge * trace(B)/n * I.
// Throws "eigen-failure".
GeneralizedEigen generalized_symmetric_eig(const Matrix& a, const Matrix& b,
                                           double fallback_ridge = 0.0);

}  // namespace ssvep
