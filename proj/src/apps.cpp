#include "csa/apps.hpp"

#include "csa/linalg.hpp"
#include "csa/oracle.hpp"
#include "csa/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csa {

namespace {

Basis ensure_orthonormal(const Basis& b, const char* what) {
  if (b.dim() == 0) {
    throw InvalidInput(std::string(what) + ": empty subspace basis");
  }
  if (b.orthonormal) {
    return b;
  }
  return orthonormalize(b.vectors);
}

double pow_count(double base, Index exp) {
  double v = 1.0;
  for (Index i = 0; i < exp; ++i) {
    v *= base;
  }
  return v;
}

}  // namespace

Index intersection_dimension(const Basis& u, const Basis& w) {
  if (u.dim() == 0 || w.dim() == 0) {
    return 0;
  }
  Eigen::JacobiSVD<Matrix> dec(u.vectors.transpose() * w.vectors);
  const Vector& cosines = dec.singularValues();
  Index count = 0;
  for (Index i = 0; i < cosines.size(); ++i) {
    if (cosines[i] >= 1.0 - tol::kOrth) {
      ++count;
    }
  }
  return count;
}

namespace {

/// Appends one orthonormal direction from `source` (minus its projection on
/// the current columns) to `cur`; returns false if source is contained in
/// the current span.
bool append_direction(Matrix& cur, const Matrix& source) {
  Matrix residual = source;
  if (cur.cols() > 0) {
    residual -= cur * (cur.transpose() * source);
  }
  if (residual.isZero(1e-12)) {
    return false;
  }
  Basis dirs = orthonormalize(residual);
  if (dirs.dim() == 0) {
    return false;
  }
  cur.conservativeResize(cur.rows(), cur.cols() + 1);
  cur.col(cur.cols() - 1) = dirs.vectors.col(0);
  return true;
}

/// Extends the solution basis to exactly k columns with intersection
/// dimension at least `target_int`. Enlarging the span never increases the
/// projection cost, so the case bound is preserved.
Basis complete_cse_basis(const Basis& basis, const Basis& w, Index target_int,
                         Index k) {
  Matrix cur = basis.vectors;
  Matrix perp;
  {
    Eigen::HouseholderQR<Matrix> qr(w.vectors);
    Matrix q = qr.householderQ();
    perp = q.rightCols(w.ambient_dim() - w.dim());
  }
  while (intersection_dimension(Basis{cur, true}, w) < target_int &&
         cur.cols() < k) {
    if (!append_direction(cur, w.vectors)) {
      break;
    }
  }
  while (cur.cols() < k) {
    if (!append_direction(cur, perp) && !append_direction(cur, w.vectors)) {
      break;
    }
  }
  return Basis{cur, true};
}

}  // namespace

CseResult run_cse(const CseInstance& inst) {
  require_data_matrix(inst.a, "run_cse");
  Basis w = ensure_orthonormal(inst.w, "run_cse");
  const Index d = inst.a.rows();
  if (w.ambient_dim() != d) {
    throw InvalidInput("run_cse: model subspace ambient dimension mismatch");
  }
  if (inst.l_min > inst.k || inst.l_min > w.dim()) {
    throw InvalidInput("run_cse: l_min must be at most k and dim(W)");
  }

  SolveConfig cfg;
  cfg.k = inst.k;
  cfg.p = 2.0;
  cfg.epsilon = inst.epsilon;
  cfg.delta = inst.delta;
  cfg.budget = inst.budget;
  cfg.seed = inst.seed;
  cfg.threads = inst.threads;

  Coreset coreset = pcps_p2(inst.a, inst.k, inst.epsilon);

  CseResult result;
  bool any_case = false;
  double best_cost = std::numeric_limits<double>::infinity();
  for (Index i = std::max<Index>(inst.l_min, 0); i <= inst.k; ++i) {
    if (i > w.dim() || inst.k - i > d - w.dim()) {
      continue;
    }
    SubspaceSplit split{w, i, inst.k - i};
    ConstraintSpec spec = split;
    GuessSolver solver = make_guess_solver(spec, 2.0);
    Solution sol = coreset_guess_solve_on(inst.a, coreset, spec, cfg, solver,
                                          NetKind::Standard);
    sol.basis = complete_cse_basis(sol.basis, w, i, inst.k);
    sol.cost_original = projection_cost(inst.a, sol.basis, 2.0);
    sol.cost_coreset = projection_cost(coreset.B, sol.basis, 2.0);

    CseCase c;
    c.intersection_dim = i;
    c.cost_original = sol.cost_original;
    c.exhaustive = sol.exhaustive;
    result.cases.push_back(c);
    if (!any_case || sol.cost_original < best_cost) {
      best_cost = sol.cost_original;
      result.solution = sol;
      result.chosen_case = i;
      any_case = true;
    }
  }
  if (!any_case) {
    throw Infeasible("run_cse: no intersection dimension in [l_min, k] is feasible");
  }
  return result;
}

PcsaResult run_pcsa(const PcsaInstance& inst) {
  require_data_matrix(inst.a, "run_pcsa");
  if (inst.groups.empty()) {
    throw InvalidInput("run_pcsa: needs at least one group");
  }
  // Unit-capacity expansion: capacity k_t becomes k_t copies with budget 1.
  Partition partition;
  for (const PcsaGroup& g : inst.groups) {
    Basis s = ensure_orthonormal(g.subspace, "run_pcsa");
    if (s.ambient_dim() != inst.a.rows()) {
      throw InvalidInput("run_pcsa: subspace ambient dimension mismatch");
    }
    if (g.capacity < 1) {
      throw InvalidInput("run_pcsa: capacities must be >= 1");
    }
    for (Index c = 0; c < g.capacity; ++c) {
      partition.subspaces.push_back(s);
    }
  }
  const Index k = static_cast<Index>(partition.subspaces.size());

  SolveConfig cfg;
  cfg.k = k;
  cfg.p = inst.p;
  cfg.epsilon = inst.epsilon;
  cfg.delta = std::min(1.0, inst.epsilon);  // Conditioned nets use eps/kappa
  cfg.budget = inst.budget;
  cfg.seed = inst.seed;
  cfg.threads = inst.threads;
  cfg.general_p_strategy = inst.general_p_strategy;

  Coreset coreset =
      inst.p == 2.0
          ? pcps_p2(inst.a, k, inst.epsilon)
          : coreset_general_p(inst.a, k, inst.epsilon, inst.p,
                              inst.general_p_strategy);

  ConstraintSpec spec = partition;
  GuessSolver solver = make_guess_solver(spec, inst.p);

  PcsaResult result;
  bool have_best = false;
  int weak_improvement_streak = 0;
  for (double kappa : inst.kappa_schedule) {
    cfg.kappa = kappa;
    Solution sol = coreset_guess_solve_on(inst.a, coreset, spec, cfg, solver,
                                          NetKind::Conditioned);
    PcsaKappaTrace trace;
    trace.kappa = kappa;
    trace.cost_original = sol.cost_original;
    trace.exhaustive = sol.exhaustive;
    result.kappa_trace.push_back(trace);

    const bool improved_significantly =
        !have_best ||
        sol.cost_original < result.solution.cost_original * (1.0 - 0.01);
    if (!have_best || sol.cost_original < result.solution.cost_original) {
      // Re-derive the selected vectors for the winning kappa.
      Matrix c_win;
      CoefficientNet net = conditioned_net(coreset.B, k, kappa, inst.epsilon);
      net.set_budget(inst.budget, inst.seed);
      net.enumerated_guess(sol.best_guess_index, c_win);
      RegressionSolution reg = solver.solve(coreset.B, c_win);
      result.selected_vectors = reg.u;
      result.solution = sol;
      result.chosen_kappa = kappa;
    }
    have_best = true;
    if (improved_significantly) {
      weak_improvement_streak = 0;
    } else if (++weak_improvement_streak >= 2) {
      break;
    }
  }
  return result;
}

namespace {

/// Column-normalizes a nonnegative row-sparse W into an orthonormal basis
/// (columns have disjoint supports, so normalization suffices); zero columns
/// are dropped.
Basis pnmf_finalize(const Matrix& w) {
  std::vector<Index> keep;
  for (Index j = 0; j < w.cols(); ++j) {
    if (w.col(j).norm() > 0.0) {
      keep.push_back(j);
    }
  }
  Matrix u(w.rows(), static_cast<Index>(keep.size()));
  for (size_t t = 0; t < keep.size(); ++t) {
    u.col(static_cast<Index>(t)) = w.col(keep[t]) / w.col(keep[t]).norm();
  }
  return Basis{u, true};
}

}  // namespace

PnmfResult run_pnmf(const PnmfInstance& inst) {
  require_data_matrix(inst.a, "run_pnmf");
  if (inst.k < 1 || inst.k > std::min(inst.a.rows(), inst.a.cols())) {
    throw InvalidParameter("run_pnmf: k must be in [1, min(d, n)]");
  }

  PnmfResult result;
  result.delta_used = inst.delta;
  if (inst.multiplicative) {
    DeltaChoice choice = multiplicative_delta(inst.a, inst.k, inst.epsilon);
    result.delta_used = choice.delta;
    result.delta_degenerate = choice.degenerate;
  }

  SolveConfig cfg;
  cfg.k = inst.k;
  cfg.p = 2.0;
  cfg.epsilon = inst.epsilon;
  cfg.delta = result.delta_used;
  cfg.budget = inst.budget;
  cfg.seed = inst.seed;
  cfg.threads = inst.threads;

  ConstraintSpec spec = NonnegativeRowSparse{inst.k};
  GuessSolver solver = make_guess_solver(spec, 2.0);
  result.solution = coreset_guess_solve(inst.a, spec, cfg, solver,
                                        NetKind::Standard, pnmf_finalize);
  return result;
}

KmeansResult run_kmeans(const KmeansInstance& inst) {
  require_data_matrix(inst.points, "run_kmeans");
  const Index n = inst.points.rows();
  if (inst.k < 1 || inst.k > n) {
    throw InvalidParameter("run_kmeans: k must be in [1, n]");
  }
  if (!(inst.epsilon > 0.0 && inst.epsilon < 1.0)) {
    throw InvalidParameter("run_kmeans: epsilon must be in (0, 1)");
  }
  const Index k = inst.k;

  // Dimension reduction: rows of `reduced` are the points expressed in the
  // top-r right-singular basis; projection costs of cluster projections are
  // band-preserved exactly as for any rank-<=k projection.
  SvdResult dec = svd(inst.points);
  const Index r_target =
      k + static_cast<Index>(std::ceil(static_cast<double>(k) / inst.epsilon));
  const Index r = std::min(r_target, dec.rank);
  Matrix reduced = dec.left.leftCols(r) * dec.singular_values.head(r).asDiagonal();
  Matrix lift = dec.right.leftCols(r);  // d x r

  // Optional row coreset.
  Matrix rows;                  // q x r
  std::vector<double> weights;  // q
  if (std::holds_alternative<RowCoresetNone>(inst.row_coreset)) {
    rows = reduced;
    weights.assign(static_cast<size_t>(n), 1.0);
  } else {
    const auto& sample = std::get<RowCoresetSample>(inst.row_coreset);
    const Index q = std::min<Index>(std::max<Index>(sample.q, k), n);
    // D^2 seeding, then weight each pick by its cell size.
    Rng rng(split_seed(sample.seed, "kmeans.rowcoreset"));
    std::vector<Index> picks;
    picks.push_back(static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(n))));
    Vector dist_sq(n);
    for (Index i = 0; i < n; ++i) {
      dist_sq[i] = (reduced.row(i) - reduced.row(picks[0])).squaredNorm();
    }
    while (static_cast<Index>(picks.size()) < q) {
      const double total = dist_sq.sum();
      Index next = 0;
      if (total <= 0.0) {
        next = static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(n)));
      } else {
        double target = rng.uniform() * total;
        for (Index i = 0; i < n; ++i) {
          target -= dist_sq[i];
          if (target <= 0.0) {
            next = i;
            break;
          }
        }
      }
      picks.push_back(next);
      for (Index i = 0; i < n; ++i) {
        dist_sq[i] = std::min(dist_sq[i],
                              (reduced.row(i) - reduced.row(next)).squaredNorm());
      }
    }
    rows.resize(static_cast<Index>(picks.size()), r);
    weights.assign(picks.size(), 0.0);
    for (size_t j = 0; j < picks.size(); ++j) {
      rows.row(static_cast<Index>(j)) = reduced.row(picks[j]);
    }
    for (Index i = 0; i < n; ++i) {
      Index nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < picks.size(); ++j) {
        const double dd =
            (reduced.row(i) - rows.row(static_cast<Index>(j))).squaredNorm();
        if (dd < best) {
          best = dd;
          nearest = static_cast<Index>(j);
        }
      }
      weights[static_cast<size_t>(nearest)] += 1.0;
    }
  }
  const Index q = rows.rows();

  const double n_assignments = pow_count(static_cast<double>(k), q);
  if (n_assignments > static_cast<double>(inst.enumeration_budget)) {
    throw Overflow("run_kmeans: k^q = " + std::to_string(n_assignments) +
                   " assignments exceed the budget; use a smaller row coreset");
  }

  // Exhaustive enumeration of assignments of coreset rows to clusters.
  std::vector<int> assignment(static_cast<size_t>(q), 0);
  std::vector<int> best_assignment = assignment;
  double best_cost = std::numeric_limits<double>::infinity();
  std::uint64_t evaluated = 0;
  while (true) {
    KmeansCenters centers = solve_kmeans_centers(rows, assignment, weights, k);
    double cost = 0.0;
    for (Index i = 0; i < q; ++i) {
      cost += weights[static_cast<size_t>(i)] *
              (rows.row(i) - centers.centers.row(assignment[static_cast<size_t>(i)]))
                  .squaredNorm();
    }
    ++evaluated;
    if (cost < best_cost) {
      best_cost = cost;
      best_assignment = assignment;
    }
    Index pos = 0;
    while (pos < q && assignment[static_cast<size_t>(pos)] == k - 1) {
      assignment[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == q) {
      break;
    }
    ++assignment[static_cast<size_t>(pos)];
  }

  KmeansCenters winner = solve_kmeans_centers(rows, best_assignment, weights, k);

  KmeansResult result;
  result.cost_reduced = best_cost;
  result.reduced_dim = r;
  result.assignments_evaluated = evaluated;
  result.empty_cluster = winner.empty_cluster;
  result.centers = winner.centers * lift.transpose();  // k x d

  // Full-data assignment by nearest returned center, cost on the original
  // points.
  result.assignment.assign(static_cast<size_t>(n), 0);
  double cost = 0.0;
  for (Index i = 0; i < n; ++i) {
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      const double dd = (inst.points.row(i) - result.centers.row(j)).squaredNorm();
      if (dd < best) {
        best = dd;
        nearest = static_cast<int>(j);
      }
    }
    result.assignment[static_cast<size_t>(i)] = nearest;
    cost += best;
  }
  result.cost = cost;
  return result;
}

SparsePcaResult run_sparse_pca(const SparsePcaInstance& inst) {
  require_data_matrix(inst.a, "run_sparse_pca");
  if (inst.k < 1 || inst.s_rows < inst.k || inst.s_rows > inst.a.rows()) {
    throw InvalidParameter("run_sparse_pca: need 1 <= k <= s_rows <= d");
  }

  Matrix b;
  Index coreset_cols = 0;
  if (inst.identity_coreset) {
    b = inst.a;
    coreset_cols = b.cols();
  } else {
    Coreset coreset = pcps_p2(inst.a, inst.k, inst.epsilon);
    b = coreset.B;
    coreset_cols = b.cols();
  }
  SparsePcaSolution sol =
      solve_sparse_pca_support(b, inst.k, inst.s_rows, inst.support_budget);

  SparsePcaResult result;
  result.u = sol.u;
  result.support = sol.support;
  result.coreset_cols = coreset_cols;
  const Matrix ua = sol.u.transpose() * inst.a;
  result.mass_max = ua.squaredNorm();
  result.cost_min = inst.a.squaredNorm() - result.mass_max;
  return result;
}

}  // namespace csa
