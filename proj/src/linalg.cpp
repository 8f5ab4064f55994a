#include "csa/linalg.hpp"

#include <Eigen/SVD>
#include <Eigen/QR>

#include <cmath>

namespace csa {

SvdResult svd(const Matrix& a) {
  require_data_matrix(a, "svd");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = dec.singularValues();
  const double cut = sv.size() > 0 ? tol::kRank * sv[0] : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv[rank] > cut && sv[rank] > 0.0) {
    ++rank;
  }
  SvdResult out;
  out.rank = rank;
  out.left = dec.matrixU().leftCols(rank);
  out.singular_values = sv.head(rank);
  out.right = dec.matrixV().leftCols(rank);
  return out;
}

double mixed_norm_pow(const Matrix& m, double p) {
  if (!(p >= 1.0)) {
    throw InvalidParameter("mixed_norm_pow: p must be >= 1");
  }
  require_finite(m, "mixed_norm_pow");
  if (p == 2.0) {
    return m.squaredNorm();
  }
  double total = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    total += std::pow(m.col(j).norm(), p);
  }
  return total;
}

double projection_cost(const Matrix& a, const Basis& u, double p) {
  require_data_matrix(a, "projection_cost");
  if (u.ambient_dim() != a.rows()) {
    throw InvalidInput("projection_cost: basis ambient dimension mismatch");
  }
  if (!u.orthonormal) {
    throw InvalidInput("projection_cost: basis must be orthonormal");
  }
  if (u.dim() == 0) {
    return mixed_norm_pow(a, p);
  }
  Matrix residual = a - u.vectors * (u.vectors.transpose() * a);
  return mixed_norm_pow(residual, p);
}

Basis orthonormalize(const Matrix& v) {
  if (v.rows() < 1 || v.cols() < 1) {
    throw InvalidInput("orthonormalize: need at least a 1x1 input");
  }
  if (v.rows() < v.cols()) {
    throw InvalidInput("orthonormalize: more columns than rows");
  }
  require_finite(v, "orthonormalize");
  if (v.isZero(0.0)) {
    return Basis::empty(v.rows());
  }
  SvdResult dec = svd(v);
  return Basis{dec.left, true};
}

Matrix least_squares(const Matrix& m, const Matrix& t) {
  require_data_matrix(m, "least_squares");
  require_data_matrix(t, "least_squares");
  if (m.rows() != t.rows()) {
    throw InvalidInput("least_squares: row count mismatch");
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  return cod.solve(t);
}

}  // namespace csa
