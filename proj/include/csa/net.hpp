#ifndef CSA_NET_HPP
#define CSA_NET_HPP

#include "csa/types.hpp"

#include <cstdint>
#include <vector>

namespace csa {

/// Grid net of a closed Euclidean ball: every point of the ball of the given
/// radius has a net point within granularity * radius.
struct BallNetSpec {
  int dim = 1;
  double radius = 0.0;
  double granularity = 1.0;  // delta in (0, 1]
};

/// Materialized net points for one ball. The construction is an axis-aligned
/// grid of spacing 2*delta*radius/sqrt(dim) (so the worst-case distance to a
/// grid point, half the cell diagonal, is exactly delta*radius) intersected
/// with the ball of radius (1+delta)*radius; the slack keeps the cover valid
/// near the sphere. The origin is always a net point. radius = 0 yields the
/// single point {0}.
class BallNet {
 public:
  BallNet(const BallNetSpec& spec, std::vector<double> flat_points,
          Index count)
      : spec_(spec), flat_(std::move(flat_points)), count_(count) {}

  const BallNetSpec& spec() const { return spec_; }
  Index count() const { return count_; }
  /// Pointer to `dim` doubles for net point i. Enumeration order is fixed:
  /// odometer over axes with axis 0 fastest, each axis ascending.
  const double* point(Index i) const {
    return flat_.data() + static_cast<size_t>(i) * spec_.dim;
  }

 private:
  BallNetSpec spec_;
  std::vector<double> flat_;
  Index count_;
};

BallNet ball_net(const BallNetSpec& spec);

/// Product net over the columns of a k x r coefficient matrix C: column i is
/// drawn from a ball net of radius_scale * |b_i| with the given granularity.
/// Guesses are addressed by a single integer index in odometer order
/// (column 0 least significant); in sampled mode, guesses are i.i.d. uniform
/// net points derived per-ordinal from the seed, so any partition of the
/// ordinal range sees identical draws.
class CoefficientNet {
 public:
  CoefficientNet(std::vector<BallNet> columns, Index k);

  Index k() const { return k_; }
  Index r() const { return static_cast<Index>(columns_.size()); }
  const BallNet& column(Index i) const {
    return columns_[static_cast<size_t>(i)];
  }

  /// Product of per-column counts, saturated at 2^64 - 1.
  std::uint64_t total_count() const { return total_count_; }
  bool count_saturated() const { return count_saturated_; }

  /// budget = 0 means unlimited. Sets the truncated flag.
  void set_budget(std::uint64_t budget, std::uint64_t seed);
  bool truncated() const { return truncated_; }
  std::uint64_t budget() const { return budget_; }
  /// Number of guesses an enumeration will visit (total, or budget when
  /// truncated).
  std::uint64_t enumeration_count() const;

  /// Writes exhaustive-mode guess `index` into the k x r matrix `c`.
  void guess(std::uint64_t index, Matrix& c) const;
  /// Writes sampled-mode guess `ordinal` into `c`.
  void sampled_guess(std::uint64_t ordinal, Matrix& c) const;
  /// Dispatches on truncated().
  void enumerated_guess(std::uint64_t ordinal, Matrix& c) const;

  /// Per-column net index decomposition of an exhaustive-mode index.
  std::vector<Index> digits(std::uint64_t index) const;

 private:
  std::vector<BallNet> columns_;
  Index k_;
  std::uint64_t total_count_ = 1;
  bool count_saturated_ = false;
  std::uint64_t budget_ = 0;
  std::uint64_t seed_ = 0;
  bool truncated_ = false;
};

/// Net for C = U^T B when U has orthonormal columns: column i of C then has
/// norm at most |b_i|, so column i is guessed in the ball of radius |b_i|.
CoefficientNet coefficient_net(const Matrix& b, Index k, double delta);

/// Net for C = V^+-style coefficients when the optimal V has condition
/// number at most kappa: radius kappa * |b_i| per column with granularity
/// epsilon / kappa, so the guessing error per column is epsilon * |b_i|.
CoefficientNet conditioned_net(const Matrix& b, Index k, double kappa,
                               double epsilon);

/// Sequential cursor over exhaustive-mode guesses. advance() returns the
/// highest column whose net point changed, which callers can use to update
/// incremental state.
class NetCursor {
 public:
  explicit NetCursor(const CoefficientNet& net);

  void seek(std::uint64_t index);
  /// Moves to the next guess; returns the largest column index whose digit
  /// changed. Must not be called past the last guess.
  Index advance();
  Index digit(Index column) const {
    return digits_[static_cast<size_t>(column)];
  }
  const double* column_point(Index column) const {
    return net_->column(column).point(digit(column));
  }
  void write(Matrix& c) const;

 private:
  const CoefficientNet* net_;
  std::vector<Index> digits_;
};

}  // namespace csa

#endif  // CSA_NET_HPP
