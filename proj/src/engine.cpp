#include "csa/engine.hpp"

#include "csa/linalg.hpp"
#include "csa/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csa {

GuessSolver make_guess_solver(const ConstraintSpec& spec, double p) {
  GuessSolver out;
  if (const auto* u = std::get_if<Unconstrained>(&spec)) {
    (void)u;
    if (p != 2.0) {
      throw InvalidParameter("make_guess_solver: unconstrained solver is p=2 only");
    }
    out.solve = [](const Matrix& b, const Matrix& c) {
      return solve_unconstrained(b, c);
    };
    out.cost = [](const Matrix& b, const Matrix& c) {
      return solve_unconstrained(b, c).cost;
    };
  } else if (const auto* split = std::get_if<SubspaceSplit>(&spec)) {
    SubspaceSplit s = *split;
    out.solve = [s](const Matrix& b, const Matrix& c) {
      return solve_subspace_ls(b, c, s);
    };
    out.cost = [s](const Matrix& b, const Matrix& c) {
      return solve_subspace_ls(b, c, s).cost;
    };
  } else if (const auto* part = std::get_if<Partition>(&spec)) {
    Partition s = *part;
    out.solve = [s, p](const Matrix& b, const Matrix& c) {
      return solve_partition_lp(b, c, s, p);
    };
    out.cost = [s, p](const Matrix& b, const Matrix& c) {
      return solve_partition_lp(b, c, s, p).cost;
    };
  } else if (std::get_if<NonnegativeRowSparse>(&spec) != nullptr) {
    out.solve = [](const Matrix& b, const Matrix& c) {
      // The guessed object is H = U^T B; rows of B are fit by single
      // nonnegative multiples of rows of H.
      return solve_pnmf_rows(b, c);
    };
    out.cost = [](const Matrix& b, const Matrix& c) {
      return pnmf_rows_cost(b, c);
    };
  } else {
    throw InvalidParameter(
        "make_guess_solver: this constraint family is handled by its "
        "application, not the guess engine");
  }
  return out;
}

namespace {

struct ScanResult {
  double cost = std::numeric_limits<double>::infinity();
  std::uint64_t index = 0;
  bool valid = false;
};

void merge_min(ScanResult& into, const ScanResult& other) {
  if (!other.valid) {
    return;
  }
  if (!into.valid || other.cost < into.cost ||
      (other.cost == into.cost && other.index < into.index)) {
    into = other;
  }
}

struct ScanError {
  std::exception_ptr error;
  std::uint64_t index = 0;
};

/// Rethrows the in-flight exception with the failing guess index prepended,
/// preserving the library's exception types.
[[noreturn]] void rethrow_with_index(std::uint64_t index) {
  const std::string prefix = "guess " + std::to_string(index) + ": ";
  try {
    throw;
  } catch (const Overflow& e) {
    throw Overflow(prefix + e.what());
  } catch (const Infeasible& e) {
    throw Infeasible(prefix + e.what());
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(prefix + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(prefix + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(prefix + e.what());
  }
}

/// Runs fn(first, last, out) on `threads` contiguous chunks of [0, count).
template <typename Fn>
ScanResult parallel_scan(std::uint64_t count, int threads, const Fn& fn) {
  threads = std::max(1, threads);
  const std::uint64_t n_chunks =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), std::max<std::uint64_t>(count, 1));
  std::vector<ScanResult> results(n_chunks);
  std::vector<ScanError> errors(n_chunks);
  std::vector<std::thread> workers;
  const std::uint64_t chunk = (count + n_chunks - 1) / n_chunks;
  for (std::uint64_t t = 0; t < n_chunks; ++t) {
    const std::uint64_t first = t * chunk;
    const std::uint64_t last = std::min(count, first + chunk);
    if (first >= last) {
      continue;
    }
    workers.emplace_back([&, t, first, last]() {
      try {
        fn(first, last, results[t]);
      } catch (...) {
        errors[t].error = std::current_exception();
        errors[t].index = first;
      }
    });
  }
  for (std::thread& w : workers) {
    w.join();
  }
  for (const ScanError& e : errors) {
    if (e.error) {
      std::rethrow_exception(e.error);
    }
  }
  ScanResult best;
  for (const ScanResult& r : results) {
    merge_min(best, r);
  }
  return best;
}

/// Batched exhaustive scan for the unconstrained p=2 guess cost
///   cost(C) = |B|_F^2 - tr((C C^T)^+ (C M C^T)),   M = B^T B.
/// Specialized to k = 2 with an analytic 2x2 pseudo-inverse. Guesses share
/// all but the fastest-varying column between consecutive indices, so the
/// column-0-independent parts of C C^T and C M C^T are cached per batch and
/// every guess is evaluated fresh from those caches (no drift, identical
/// results for any chunking).
class UnconstrainedP2Scan {
 public:
  UnconstrainedP2Scan(const Matrix& b, const CoefficientNet& net)
      : net_(&net),
        m_(b.transpose() * b),
        total_sq_(b.squaredNorm()),
        r_(net.r()) {}

  void run_chunk(std::uint64_t first, std::uint64_t last, ScanResult& out) const {
    NetCursor cursor(*net_);
    cursor.seek(first);
    BatchState batch;
    rebuild_batch(cursor, batch);
    for (std::uint64_t idx = first; idx < last; ++idx) {
      const double* c0 = cursor.column_point(0);
      const double cost = guess_cost(batch, c0);
      if (cost < out.cost || !out.valid) {
        out.cost = cost;
        out.index = idx;
        out.valid = true;
      }
      if (idx + 1 < last) {
        const Index changed = cursor.advance();
        if (changed > 0) {
          rebuild_batch(cursor, batch);
        }
      }
    }
  }

 private:
  struct BatchState {
    // Parts of G = C C^T and T = C M C^T that do not involve column 0, plus
    // w = sum_{j >= 1} M(0, j) c_j and the diagonal weight M(0, 0).
    double g_rest[3] = {0, 0, 0};  // (0,0), (0,1), (1,1)
    double t_rest[3] = {0, 0, 0};
    double w[2] = {0, 0};
    double m00 = 0.0;
  };

  void rebuild_batch(const NetCursor& cursor, BatchState& s) const {
    s = BatchState();
    s.m00 = m_(0, 0);
    for (Index i = 1; i < r_; ++i) {
      const double* ci = cursor.column_point(i);
      s.g_rest[0] += ci[0] * ci[0];
      s.g_rest[1] += ci[0] * ci[1];
      s.g_rest[2] += ci[1] * ci[1];
      const double m0i = m_(0, i);
      s.w[0] += m0i * ci[0];
      s.w[1] += m0i * ci[1];
      for (Index j = 1; j < r_; ++j) {
        const double* cj = cursor.column_point(j);
        const double mij = m_(i, j);
        s.t_rest[0] += mij * ci[0] * cj[0];
        s.t_rest[1] += mij * ci[0] * cj[1];
        s.t_rest[2] += mij * ci[1] * cj[1];
      }
    }
  }

  double guess_cost(const BatchState& s, const double* c0) const {
    const double g00 = s.g_rest[0] + c0[0] * c0[0];
    const double g01 = s.g_rest[1] + c0[0] * c0[1];
    const double g11 = s.g_rest[2] + c0[1] * c0[1];
    const double t00 = s.t_rest[0] + 2.0 * c0[0] * s.w[0] + s.m00 * c0[0] * c0[0];
    const double t01 = s.t_rest[1] + c0[0] * s.w[1] + c0[1] * s.w[0] +
                       s.m00 * c0[0] * c0[1];
    const double t11 = s.t_rest[2] + 2.0 * c0[1] * s.w[1] + s.m00 * c0[1] * c0[1];

    const double trace_g = g00 + g11;
    const double det = g00 * g11 - g01 * g01;
    double captured = 0.0;
    if (det > 1e-12 * trace_g * trace_g) {
      captured = (g11 * t00 - 2.0 * g01 * t01 + g00 * t11) / det;
    } else if (trace_g > 0.0) {
      // Rank-one G: G^+ = G / tr(G)^2, and range(T) lies in range(G).
      captured = (g00 * t00 + 2.0 * g01 * t01 + g11 * t11) / (trace_g * trace_g);
    }
    const double cost = total_sq_ - captured;
    return cost > 0.0 ? cost : 0.0;
  }

  const CoefficientNet* net_;
  Matrix m_;
  double total_sq_;
  Index r_;
};

Basis default_finalize(const Matrix& u) {
  if (u.isZero(0.0)) {
    return Basis::empty(u.rows());
  }
  return orthonormalize(u);
}

}  // namespace

Solution coreset_guess_solve_on(const Matrix& a, const Coreset& coreset,
                                const ConstraintSpec& spec,
                                const SolveConfig& cfg,
                                const GuessSolver& solver, NetKind net_kind,
                                const BasisFinalizer& finalize,
                                bool force_generic_scan) {
  require_data_matrix(a, "coreset_guess_solve");
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw InvalidParameter("coreset_guess_solve: epsilon must be in (0, 1)");
  }
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) {
    throw InvalidParameter("coreset_guess_solve: delta must be in (0, 1]");
  }
  const Matrix& b = coreset.B;

  CoefficientNet net = net_kind == NetKind::Standard
                           ? coefficient_net(b, cfg.k, cfg.delta)
                           : conditioned_net(b, cfg.k, cfg.kappa, cfg.epsilon);
  net.set_budget(cfg.budget, cfg.seed);
  const std::uint64_t count = net.enumeration_count();

  ScanResult best;
  const bool fast_path = !force_generic_scan && !net.truncated() &&
                         cfg.k == 2 && cfg.p == 2.0 &&
                         std::holds_alternative<Unconstrained>(spec);
  if (fast_path) {
    UnconstrainedP2Scan scan(b, net);
    best = parallel_scan(count, cfg.threads,
                         [&](std::uint64_t first, std::uint64_t last, ScanResult& out) {
                           scan.run_chunk(first, last, out);
                         });
  } else if (!net.truncated()) {
    best = parallel_scan(count, cfg.threads,
                         [&](std::uint64_t first, std::uint64_t last, ScanResult& out) {
                           NetCursor cursor(net);
                           cursor.seek(first);
                           Matrix c;
                           for (std::uint64_t idx = first; idx < last; ++idx) {
                             cursor.write(c);
                             double cost = 0.0;
                             try {
                               cost = solver.cost(b, c);
                             } catch (...) {
                               rethrow_with_index(idx);
                             }
                             ScanResult r{cost, idx, true};
                             merge_min(out, r);
                             if (idx + 1 < last) {
                               cursor.advance();
                             }
                           }
                         });
  } else {
    best = parallel_scan(count, cfg.threads,
                         [&](std::uint64_t first, std::uint64_t last, ScanResult& out) {
                           Matrix c;
                           for (std::uint64_t idx = first; idx < last; ++idx) {
                             net.sampled_guess(idx, c);
                             double cost = 0.0;
                             try {
                               cost = solver.cost(b, c);
                             } catch (...) {
                               rethrow_with_index(idx);
                             }
                             ScanResult r{cost, idx, true};
                             merge_min(out, r);
                           }
                         });
  }
  if (!best.valid) {
    throw Infeasible("coreset_guess_solve: no guesses evaluated");
  }

  Matrix c_win;
  net.enumerated_guess(best.index, c_win);
  RegressionSolution winner = solver.solve(b, c_win);

  Solution sol;
  sol.basis = finalize ? finalize(winner.u) : default_finalize(winner.u);
  if (!sol.basis.orthonormal) {
    throw InvalidInput("coreset_guess_solve: finalizer must return an orthonormal basis");
  }
  sol.best_guess_cost = winner.cost;
  sol.best_guess_index = best.index;
  sol.guesses_evaluated = count;
  sol.net_total = net.total_count();
  sol.truncated = net.truncated();
  sol.exhaustive = !net.truncated();
  sol.cost_coreset = projection_cost(b, sol.basis, cfg.p);
  sol.cost_original = projection_cost(a, sol.basis, cfg.p);
  sol.net_granularity =
      net_kind == NetKind::Standard ? cfg.delta : cfg.epsilon;  // kappa * (eps/kappa)
  sol.delta_bound = (1.0 + coreset.epsilon) * mixed_norm_pow(a, cfg.p) *
                    (std::pow(1.0 + sol.net_granularity, cfg.p) - 1.0);
  sol.coreset_cols = b.cols();
  sol.solver_converged = winner.converged;
  return sol;
}

Solution coreset_guess_solve(const Matrix& a, const ConstraintSpec& spec,
                             const SolveConfig& cfg, const GuessSolver& solver,
                             NetKind net_kind, const BasisFinalizer& finalize,
                             bool force_generic_scan) {
  Coreset coreset =
      cfg.p == 2.0
          ? pcps_p2(a, cfg.k, cfg.epsilon)
          : coreset_general_p(a, cfg.k, cfg.epsilon, cfg.p, cfg.general_p_strategy);
  return coreset_guess_solve_on(a, coreset, spec, cfg, solver, net_kind,
                                finalize, force_generic_scan);
}

DeltaChoice multiplicative_delta(const Matrix& a, Index k, double epsilon) {
  require_data_matrix(a, "multiplicative_delta");
  if (k < 1) {
    throw InvalidParameter("multiplicative_delta: k must be >= 1");
  }
  SvdResult dec = svd(a);
  const double tail = dec.tail_energy(k);
  DeltaChoice out;
  if (tail <= 0.0) {
    out.delta = tol::kDeltaMin;
    out.degenerate = true;
    return out;
  }
  out.delta = std::clamp(epsilon * tail / a.squaredNorm(), tol::kDeltaMin, 1.0);
  return out;
}

double mc_rank_preservation(const Matrix& m, int trials, std::uint64_t seed) {
  require_data_matrix(m, "mc_rank_preservation");
  if (trials < 1) {
    throw InvalidParameter("mc_rank_preservation: trials must be >= 1");
  }
  const Index j = m.isZero(0.0) ? 0 : svd(m).rank;
  if (j == 0) {
    return 1.0;
  }
  Rng rng(split_seed(seed, "engine.rank_mc"));
  int successes = 0;
  Matrix r(m.cols(), j);
  for (int t = 0; t < trials; ++t) {
    for (Index col = 0; col < j; ++col) {
      for (Index row = 0; row < m.cols(); ++row) {
        r(row, col) = rng.gaussian();
      }
    }
    Matrix mr = m * r;
    if (svd(mr).rank == j) {
      ++successes;
    }
  }
  return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace csa
