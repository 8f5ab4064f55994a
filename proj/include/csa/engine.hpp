#ifndef CSA_ENGINE_HPP
#define CSA_ENGINE_HPP

#include "csa/coreset.hpp"
#include "csa/net.hpp"
#include "csa/solvers.hpp"
#include "csa/types.hpp"

#include <cstdint>
#include <functional>

namespace csa {

struct SolveConfig {
  Index k = 1;
  double p = 2.0;
  double epsilon = 0.5;  // coreset accuracy
  double delta = 0.5;    // net granularity (Standard nets)
  double kappa = 1.0;    // condition-number bound (Conditioned nets)
  std::uint64_t budget = 0;  // guess cap; 0 = unlimited (exhaustive)
  std::uint64_t seed = 0;
  int threads = 1;
  GeneralPStrategy general_p_strategy = IdentityStrategy{};  // p != 2 coreset
};

enum class NetKind { Standard, Conditioned };

struct Solution {
  Basis basis;  // orthonormal span of the winning U
  double cost_original = 0.0;  // on A
  double cost_coreset = 0.0;   // on B, with the final basis
  double best_guess_cost = 0.0;  // winning per-guess regression cost on B
  std::uint64_t best_guess_index = 0;
  std::uint64_t guesses_evaluated = 0;
  std::uint64_t net_total = 0;  // saturating
  bool truncated = false;
  bool exhaustive = false;
  // Additive error term the framework guarantees for an exhaustive net with
  // an exact per-guess solver:
  // (1 + epsilon) * |A|_{2,p}^p * ((1 + gamma)^p - 1), where gamma is the
  // per-column guessing error ratio of the net actually used.
  double delta_bound = 0.0;
  double net_granularity = 0.0;  // the gamma above
  Index coreset_cols = 0;
  bool solver_converged = true;
};

/// Per-guess regression oracle: `cost` evaluates the optimum value only (hot
/// path), `solve` returns the full minimizer (called once, on the winner).
struct GuessSolver {
  std::function<double(const Matrix& b, const Matrix& c)> cost;
  std::function<RegressionSolution(const Matrix& b, const Matrix& c)> solve;
};

/// Builds the matching exact solver for a constraint family.
GuessSolver make_guess_solver(const ConstraintSpec& spec, double p);

/// Maps the winning (not necessarily orthonormal) U to the basis reported in
/// the Solution. Defaults to orthonormalize(U); applications with structured
/// feasibility (nonnegative row-sparse U) supply their own.
using BasisFinalizer = std::function<Basis(const Matrix& u)>;

/// The three-step pipeline: sketch A, enumerate coefficient guesses, solve
/// the constrained regression per guess, keep the argmin by guess cost
/// (smallest index on ties), re-orthonormalize the winner and evaluate it on
/// the original instance.
Solution coreset_guess_solve(const Matrix& a, const ConstraintSpec& spec,
                             const SolveConfig& cfg, const GuessSolver& solver,
                             NetKind net_kind,
                             const BasisFinalizer& finalize = nullptr,
                             bool force_generic_scan = false);

/// Same pipeline on a prebuilt coreset (`a` is still used for the final
/// original-instance evaluation and the delta bound).
Solution coreset_guess_solve_on(const Matrix& a, const Coreset& coreset,
                                const ConstraintSpec& spec,
                                const SolveConfig& cfg,
                                const GuessSolver& solver, NetKind net_kind,
                                const BasisFinalizer& finalize = nullptr,
                                bool force_generic_scan = false);

struct DeltaChoice {
  double delta = 0.0;
  bool degenerate = false;  // |A - A_k| = 0; delta floored
};

/// epsilon * |A - A_k|_F^2 / |A|_F^2, clamped to (kDeltaMin, 1]. With this
/// granularity the additive O(delta |A|_F^2) term is O(epsilon) * OPT for
/// p = 2 problems whose optimum is at least |A - A_k|_F^2.
DeltaChoice multiplicative_delta(const Matrix& a, Index k, double epsilon);

/// Fraction of `trials` in which a Gaussian R with rank(M) columns preserves
/// the rank of M under right multiplication.
double mc_rank_preservation(const Matrix& m, int trials, std::uint64_t seed);

}  // namespace csa

#endif  // CSA_ENGINE_HPP
