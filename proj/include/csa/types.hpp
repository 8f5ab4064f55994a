#ifndef CSA_TYPES_HPP
#define CSA_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace csa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Numerical tolerances used throughout. The guarantees in this library are
// exact-arithmetic statements; these thresholds decide when floating point
// results count as satisfying them.
namespace tol {
inline constexpr double kOrth = 1e-8;    // orthonormality: |U^T U - I| max norm
inline constexpr double kRecon = 1e-10;  // SVD reconstruction, relative to |A|_F
inline constexpr double kRank = 1e-10;   // rank cut: sigma_i > kRank * sigma_max
inline constexpr double kCostRecompute = 1e-8;  // relative, for reported costs
inline constexpr double kDeltaMin = 1e-6;       // floor for auto-derived delta
}  // namespace tol

struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an enumeration (assignments, supports, guesses) would exceed
// the configured budget.
struct Overflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  int line_number;
};

/// A set of vectors in R^d, stored as the columns of a d x m matrix.
/// `orthonormal` records whether the columns form an orthonormal system;
/// factories that guarantee it (orthonormalize, svd) set the flag.
struct Basis {
  Matrix vectors;  // d x m
  bool orthonormal = false;

  Index ambient_dim() const { return vectors.rows(); }
  Index dim() const { return vectors.cols(); }

  static Basis empty(Index ambient) {
    return Basis{Matrix(ambient, 0), true};
  }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidInput(std::string(what) + ": non-finite entries");
  }
}

inline void require_data_matrix(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw InvalidInput(std::string(what) + ": matrix must be at least 1x1");
  }
  require_finite(m, what);
}

}  // namespace csa

#endif  // CSA_TYPES_HPP
