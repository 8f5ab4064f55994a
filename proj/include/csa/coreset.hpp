#ifndef CSA_CORESET_HPP
#define CSA_CORESET_HPP

#include "csa/linalg.hpp"
#include "csa/types.hpp"

#include <cstdint>
#include <utility>
#include <variant>

namespace csa {

enum class CoresetKind {
  // p = 2 sketch: projection costs on B track those on A up to a
  // P-independent offset plus an eps * |A - A_k|_F^2 band.
  OneSidedOffset,
  // reweighted column sample; the multiplicative property is checked
  // empirically and never asserted as a hard guarantee.
  Multiplicative,
  Identity,
};

struct Coreset {
  Matrix B;  // d x r
  double epsilon = 0.0;
  CoresetKind kind = CoresetKind::Identity;
  Index source_rows = 0;
  Index source_cols = 0;
  Index k = 0;
};

/// Rank-(k + ceil(k/epsilon)) truncated-SVD sketch for squared Frobenius
/// projection costs, stored compactly as the d x r matrix of scaled left
/// singular vectors. r is capped at rank(A). Every |.|_F projection cost of
/// the d x n truncated reconstruction is preserved by the compact form.
Coreset pcps_p2(const Matrix& a, Index k, double epsilon);

struct IdentityStrategy {};
struct SensitivitySample {
  Index target_size = 0;
  std::uint64_t seed = 0;
};
using GeneralPStrategy = std::variant<IdentityStrategy, SensitivitySample>;

/// Coreset interface for general p. Identity returns B = A (vacuously a
/// coreset). SensitivitySample draws columns i.i.d. with probabilities mixed
/// from column leverage scores and the uniform distribution, reweighted so
/// the (2,p)-cost is preserved in expectation.
Coreset coreset_general_p(const Matrix& a, Index k, double epsilon, double p,
                          const GeneralPStrategy& strategy);

struct VerificationReport {
  double min_diff = 0.0;     // min over sampled P of |A-PA|^2 - |B-PB|^2
  double max_diff = 0.0;
  double spread = 0.0;       // max_diff - min_diff
  double band_bound = 0.0;   // epsilon * |A - A_k|_F^2
  double tail_energy = 0.0;  // |A - A_k|_F^2
  int n_samples = 0;
  bool passed = false;
};

/// Samples random rank-<=k orthonormal bases and checks the one-sided-offset
/// band: all diffs >= -tolerance and the spread is at most
/// epsilon * |A - A_k|_F^2 + tolerance. A negative tolerance means
/// 1e-8 * |A|_F^2. Report-only; never throws on failure.
VerificationReport verify_pcps(const Matrix& a, const Matrix& b, Index k,
                               double epsilon, int n_samples,
                               std::uint64_t seed, double tolerance = -1.0);

}  // namespace csa

#endif  // CSA_CORESET_HPP
