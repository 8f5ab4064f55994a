#ifndef CSA_LINALG_HPP
#define CSA_LINALG_HPP

#include "csa/types.hpp"

namespace csa {

/// Thin singular value decomposition truncated at the numerical rank:
/// A = left * diag(singular_values) * right^T with `rank` strictly positive
/// singular values above tol::kRank * sigma_max.
struct SvdResult {
  Matrix left;             // d x rank, orthonormal columns
  Vector singular_values;  // rank, nonincreasing, > 0
  Matrix right;            // n x rank, orthonormal columns
  Index rank = 0;

  /// Sum of squared singular values past index k: |A - A_k|_F^2.
  double tail_energy(Index k) const {
    double s = 0.0;
    for (Index i = k; i < rank; ++i) {
      s += singular_values[i] * singular_values[i];
    }
    return s;
  }
};

SvdResult svd(const Matrix& a);

/// Sum over columns of |column|_2^p, i.e. the p-th power of the (2,p) mixed
/// norm. Equals |M|_F^2 at p = 2.
double mixed_norm_pow(const Matrix& m, double p);

/// Cost of projecting A onto the span of an orthonormal basis U:
/// mixed_norm_pow(A - U U^T A, p). An empty basis gives mixed_norm_pow(A, p).
double projection_cost(const Matrix& a, const Basis& u, double p);

/// Orthonormal basis of span(V). Rank-deficient input yields fewer columns
/// than V; an all-zero V yields the empty basis.
Basis orthonormalize(const Matrix& v);

/// Minimum-norm C minimizing |T - M C|_F.
Matrix least_squares(const Matrix& m, const Matrix& t);

}  // namespace csa

#endif  // CSA_LINALG_HPP
