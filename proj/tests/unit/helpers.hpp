#ifndef CSA_TEST_HELPERS_HPP
#define CSA_TEST_HELPERS_HPP

#include "csa/linalg.hpp"
#include "csa/rng.hpp"
#include "csa/types.hpp"

namespace csa::test {

inline Matrix random_matrix(Index rows, Index cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = scale * rng.gaussian();
    }
  }
  return m;
}

inline Matrix random_nonnegative(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = rng.uniform();
    }
  }
  return m;
}

inline Basis random_orthonormal(Index rows, Index cols, Rng& rng) {
  return orthonormalize(random_matrix(rows, cols, rng));
}

/// Matrix with a prescribed singular spectrum (deterministic given rng).
inline Matrix matrix_with_spectrum(Index rows, Index cols, const Vector& sigma,
                                   Rng& rng) {
  Basis u = random_orthonormal(rows, sigma.size(), rng);
  Basis v = random_orthonormal(cols, sigma.size(), rng);
  return u.vectors * sigma.asDiagonal() * v.vectors.transpose();
}

}  // namespace csa::test

#endif  // CSA_TEST_HELPERS_HPP
