#include "csa/apps.hpp"

#include "csa/linalg.hpp"
#include "csa/oracle.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace csa;

namespace {

Basis coordinate_subspace(Index d, std::initializer_list<Index> axes) {
  Matrix m = Matrix::Zero(d, static_cast<Index>(axes.size()));
  Index col = 0;
  for (Index axis : axes) {
    m(axis, col++) = 1.0;
  }
  return Basis{m, true};
}

bool column_in_subspace(const Vector& v, const Basis& s, double tolerance) {
  if (v.norm() == 0.0) {
    return true;
  }
  const Vector residual = v - s.vectors * (s.vectors.transpose() * v);
  return residual.norm() <= tolerance * v.norm();
}

}  // namespace

TEST_CASE("cse: data inside W with l_min = k is fit exactly") {
  Rng rng(90);
  Basis w = test::random_orthonormal(4, 2, rng);
  Matrix a = w.vectors * test::random_matrix(2, 10, rng);
  CseInstance inst;
  inst.a = a;
  inst.w = w;
  inst.k = 2;
  inst.l_min = 2;
  inst.epsilon = 0.5;
  inst.delta = 0.5;
  CseResult res = run_cse(inst);
  CHECK(res.chosen_case == 2);
  CHECK(res.solution.cost_original <= 1e-9 * a.squaredNorm());
  CHECK(intersection_dimension(res.solution.basis, w) >= 2);
  CHECK(res.solution.basis.dim() == 2);
}

TEST_CASE("cse: trivial model space matches the unconstrained engine") {
  Rng rng(91);
  Matrix a = test::random_matrix(4, 10, rng);
  CseInstance inst;
  inst.a = a;
  inst.w = Basis{Matrix::Identity(4, 4), true};
  inst.k = 2;
  inst.l_min = 0;
  inst.epsilon = 0.5;
  inst.delta = 0.5;
  CseResult res = run_cse(inst);

  SolveConfig cfg;
  cfg.k = 2;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{2};
  Solution unconstrained = coreset_guess_solve(a, spec, cfg,
                                               make_guess_solver(spec, 2.0),
                                               NetKind::Standard);
  CHECK(res.solution.cost_original ==
        doctest::Approx(unconstrained.cost_original).epsilon(1e-8));
}

TEST_CASE("cse: planted instance stays within the additive bound") {
  Rng rng(92);
  Basis w = test::random_orthonormal(4, 2, rng);
  Matrix perp = Matrix::Identity(4, 4) - w.vectors * w.vectors.transpose();
  Vector in_w = w.vectors * test::random_matrix(2, 1, rng).col(0);
  Vector out_w = perp * test::random_matrix(4, 1, rng).col(0);
  Matrix v_star(4, 2);
  v_star.col(0) = in_w.normalized();
  v_star.col(1) = out_w.normalized();
  Matrix a = v_star * test::random_matrix(2, 12, rng) +
             0.05 * test::random_matrix(4, 12, rng);

  CseInstance inst;
  inst.a = a;
  inst.w = w;
  inst.k = 2;
  inst.l_min = 1;
  inst.epsilon = 0.5;
  inst.delta = 0.5;
  CseResult res = run_cse(inst);

  Basis planted = orthonormalize(v_star);
  const double planted_cost = projection_cost(a, planted, 2.0);
  CHECK(res.solution.cost_original <=
        (1.0 + inst.epsilon) * planted_cost + res.solution.delta_bound + 1e-9);
  CHECK(intersection_dimension(res.solution.basis, w) >= 1);
  CHECK(res.cases.size() == 2);  // i = 1, 2
}

TEST_CASE("cse: widening the case range never hurts") {
  Rng rng(93);
  Matrix a = test::random_matrix(4, 9, rng);
  Basis w = test::random_orthonormal(4, 2, rng);
  CseInstance tight, loose;
  tight.a = loose.a = a;
  tight.w = loose.w = w;
  tight.k = loose.k = 2;
  tight.epsilon = loose.epsilon = 0.5;
  tight.delta = loose.delta = 0.5;
  tight.l_min = 2;
  loose.l_min = 1;
  CHECK(run_cse(loose).solution.cost_original <=
        run_cse(tight).solution.cost_original + 1e-12);
}

TEST_CASE("cse: infeasible split reports Infeasible") {
  Rng rng(94);
  Matrix a = test::random_matrix(3, 5, rng);
  CseInstance inst;
  inst.a = a;
  inst.w = test::random_orthonormal(3, 1, rng);
  inst.k = 3;
  inst.l_min = 0;
  // k - i <= d - dim(W) = 2 forces i >= 1, but dim(W) = 1 allows i <= 1;
  // restricting l_min above that makes every case infeasible.
  inst.l_min = 2;
  CHECK_THROWS_AS(run_cse(inst), InvalidInput);
}

TEST_CASE("pcsa: one full-space group reduces to the unconstrained engine") {
  Rng rng(95);
  Matrix a = test::random_matrix(3, 8, rng);
  PcsaInstance inst;
  inst.a = a;
  inst.groups = {{Basis{Matrix::Identity(3, 3), true}, 2}};
  inst.p = 2.0;
  inst.epsilon = 0.5;
  inst.kappa_schedule = {1.0};
  PcsaResult res = run_pcsa(inst);

  SolveConfig cfg;
  cfg.k = 2;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{2};
  Solution unconstrained = coreset_guess_solve(a, spec, cfg,
                                               make_guess_solver(spec, 2.0),
                                               NetKind::Standard);
  CHECK(res.solution.cost_original ==
        doctest::Approx(unconstrained.cost_original).epsilon(1e-8));
}

TEST_CASE("pcsa: coordinate-supported data is fit exactly") {
  Rng rng(96);
  Matrix a = Matrix::Zero(3, 8);
  for (Index j = 0; j < 8; ++j) {
    const Index axis = j % 2;
    a(axis, j) = 0.5 + rng.uniform();
  }
  PcsaInstance inst;
  inst.a = a;
  inst.groups = {{coordinate_subspace(3, {0}), 1},
                 {coordinate_subspace(3, {1}), 1}};
  inst.epsilon = 0.5;
  inst.kappa_schedule = {1.0};
  PcsaResult res = run_pcsa(inst);
  CHECK(res.solution.cost_original <= 1e-9 * a.squaredNorm());
  for (Index j = 0; j < res.selected_vectors.cols(); ++j) {
    CHECK(column_in_subspace(res.selected_vectors.col(j),
                             inst.groups[static_cast<size_t>(j)].subspace, 1e-8));
  }
}

TEST_CASE("pcsa: planted orthogonal-group instance meets the additive bound") {
  Rng rng(97);
  Basis s1 = coordinate_subspace(4, {0, 1});
  Basis s2 = coordinate_subspace(4, {2, 3});
  Vector v1 = Vector::Zero(4), v2 = Vector::Zero(4);
  v1.head(2) = test::random_matrix(2, 1, rng).col(0).normalized();
  v2.tail(2) = test::random_matrix(2, 1, rng).col(0).normalized();
  Matrix v_star(4, 2);
  v_star.col(0) = v1;
  v_star.col(1) = v2;
  Matrix a = v_star * test::random_matrix(2, 10, rng) +
             0.05 * test::random_matrix(4, 10, rng);

  PcsaInstance inst;
  inst.a = a;
  inst.groups = {{s1, 1}, {s2, 1}};
  inst.epsilon = 0.5;
  inst.kappa_schedule = {1.0, 2.0};
  inst.budget = 50'000;  // kappa = 2 runs sampled; kappa = 1 is exhaustive
  inst.seed = 5;
  PcsaResult res = run_pcsa(inst);

  Basis planted = orthonormalize(v_star);
  const double planted_cost = projection_cost(a, planted, 2.0);
  CHECK(res.solution.cost_original <=
        (1.0 + inst.epsilon) * planted_cost + res.solution.delta_bound + 1e-9);
  CHECK(res.kappa_trace.size() >= 1);
  CHECK(res.kappa_trace[0].exhaustive);
}

TEST_CASE("pcsa: p = 1.5 run satisfies basic contracts") {
  Rng rng(98);
  Matrix a = test::random_matrix(3, 6, rng);
  PcsaInstance inst;
  inst.a = a;
  inst.groups = {{test::random_orthonormal(3, 2, rng), 1},
                 {test::random_orthonormal(3, 2, rng), 1}};
  inst.p = 1.5;
  inst.epsilon = 0.5;
  inst.kappa_schedule = {1.0};
  inst.budget = 4000;
  inst.seed = 11;
  PcsaResult res = run_pcsa(inst);
  CHECK(res.solution.cost_original <= mixed_norm_pow(a, 1.5) + 1e-9);
  CHECK(res.solution.cost_original ==
        doctest::Approx(projection_cost(a, res.solution.basis, 1.5)).epsilon(1e-8));
}

TEST_CASE("pcsa rejects empty groups") {
  Rng rng(99);
  PcsaInstance inst;
  inst.a = test::random_matrix(3, 5, rng);
  CHECK_THROWS_AS(run_pcsa(inst), InvalidInput);
}

TEST_CASE("pnmf: rank-one nonnegative blocks are fit exactly") {
  Rng rng(100);
  // 4 x 8 block-diagonal with two rank-1 nonnegative blocks.
  Matrix a = Matrix::Zero(4, 8);
  Vector u1 = test::random_nonnegative(2, 1, rng).col(0) + Vector::Constant(2, 0.2);
  Vector u2 = test::random_nonnegative(2, 1, rng).col(0) + Vector::Constant(2, 0.2);
  for (Index j = 0; j < 4; ++j) {
    a.block(0, j, 2, 1) = u1 * (0.3 + rng.uniform());
    a.block(2, 4 + j, 2, 1) = u2 * (0.3 + rng.uniform());
  }
  PnmfInstance inst;
  inst.a = a;
  inst.k = 2;
  inst.epsilon = 0.5;
  inst.delta = 0.5;
  PnmfResult res = run_pnmf(inst);
  CHECK(res.solution.cost_original <= 1e-9 * a.squaredNorm());

  // Feasibility: nonnegative, orthonormal, at most one nonzero per row.
  const Matrix& u = res.solution.basis.vectors;
  CHECK(u.minCoeff() >= 0.0);
  CHECK((u.transpose() * u - Matrix::Identity(u.cols(), u.cols()))
            .cwiseAbs()
            .maxCoeff() <= tol::kOrth);
  for (Index i = 0; i < u.rows(); ++i) {
    int nnz = 0;
    for (Index j = 0; j < u.cols(); ++j) {
      if (u(i, j) != 0.0) {
        ++nnz;
      }
    }
    CHECK(nnz <= 1);
  }
}

TEST_CASE("pnmf: diagonal instance with k = d is exact") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 3.0, 2.0, 1.0;
  PnmfInstance inst;
  inst.a = a;
  inst.k = 3;
  inst.epsilon = 0.5;
  inst.delta = 0.5;
  PnmfResult res = run_pnmf(inst);
  CHECK(res.solution.cost_original <= 1e-9 * a.squaredNorm());
}

TEST_CASE("pnmf: random nonnegative instance meets the oracle-backed bound") {
  Rng rng(101);
  Matrix a = test::random_nonnegative(4, 10, rng);
  PnmfInstance inst;
  inst.a = a;
  inst.k = 2;
  inst.epsilon = 0.5;
  inst.delta = 0.25;
  PnmfResult res = run_pnmf(inst);
  REQUIRE(res.solution.exhaustive);
  OracleReport oracle = brute_pnmf(a, 2, 100, 17);
  // The oracle value upper-bounds OPT, so this direction is valid.
  CHECK(res.solution.cost_original <=
        (1.0 + inst.epsilon) * oracle.opt_value +
            inst.delta * a.squaredNorm() + 1e-6);
}

TEST_CASE("pnmf multiplicative mode derives delta from the spectrum") {
  Rng rng(102);
  Matrix a = test::random_nonnegative(4, 9, rng);
  PnmfInstance inst;
  inst.a = a;
  inst.k = 2;
  inst.epsilon = 0.5;
  inst.multiplicative = true;
  inst.budget = 20'000;
  inst.seed = 3;
  PnmfResult res = run_pnmf(inst);
  const double expected = 0.5 * svd(a).tail_energy(2) / a.squaredNorm();
  CHECK(res.delta_used ==
        doctest::Approx(std::clamp(expected, tol::kDeltaMin, 1.0)));
}

TEST_CASE("kmeans: forced split on the line") {
  Matrix pts(3, 1);
  pts << 0.0, 1.0, 10.0;
  KmeansInstance inst;
  inst.points = pts;
  inst.k = 2;
  inst.epsilon = 0.5;
  KmeansResult res = run_kmeans(inst);
  CHECK(res.cost == doctest::Approx(0.5));
  CHECK(res.assignment[0] == res.assignment[1]);
  CHECK(res.assignment[0] != res.assignment[2]);
}

TEST_CASE("kmeans: n = k gives zero cost") {
  Rng rng(103);
  Matrix pts = test::random_matrix(4, 3, rng);
  KmeansInstance inst;
  inst.points = pts;
  inst.k = 4;
  inst.epsilon = 0.5;
  KmeansResult res = run_kmeans(inst);
  CHECK(res.cost <= 1e-9 * pts.squaredNorm());
}

TEST_CASE("kmeans: within (1+eps)^3 of the exhaustive optimum") {
  Rng rng(104);
  for (int inst_idx = 0; inst_idx < 2; ++inst_idx) {
    Matrix pts = test::random_matrix(8, 5, rng);
    KmeansInstance inst;
    inst.points = pts;
    inst.k = 2;
    inst.epsilon = 0.5;
    KmeansResult res = run_kmeans(inst);
    OracleReport oracle = brute_kmeans(pts, 2);
    CHECK(res.cost <= std::pow(1.5, 3) * oracle.opt_value + 1e-8);

    // Feasibility: every point is assigned to its nearest returned center.
    for (Index i = 0; i < pts.rows(); ++i) {
      double best = 1e300;
      int nearest = 0;
      for (Index j = 0; j < 2; ++j) {
        const double dd = (pts.row(i) - res.centers.row(j)).squaredNorm();
        if (dd < best) {
          best = dd;
          nearest = static_cast<int>(j);
        }
      }
      const double chosen =
          (pts.row(i) - res.centers.row(res.assignment[static_cast<size_t>(i)]))
              .squaredNorm();
      CHECK(chosen <= best + 1e-12);
      (void)nearest;
    }
  }
}

TEST_CASE("kmeans: sampled row coreset is deterministic and sane") {
  Rng rng(105);
  Matrix pts = test::random_matrix(12, 4, rng);
  KmeansInstance inst;
  inst.points = pts;
  inst.k = 2;
  inst.epsilon = 0.5;
  inst.row_coreset = RowCoresetSample{5, 42};
  KmeansResult r1 = run_kmeans(inst);
  KmeansResult r2 = run_kmeans(inst);
  CHECK(r1.cost == r2.cost);
  OracleReport oracle = brute_kmeans(pts, 2);
  CHECK(r1.cost >= oracle.opt_value - 1e-9);  // no clustering beats OPT
}

TEST_CASE("kmeans: enumeration budget overflow") {
  Rng rng(106);
  Matrix pts = test::random_matrix(30, 2, rng);
  KmeansInstance inst;
  inst.points = pts;
  inst.k = 3;
  inst.epsilon = 0.5;
  inst.enumeration_budget = 1000;
  CHECK_THROWS_AS(run_kmeans(inst), Overflow);
}

TEST_CASE("sparse pca: s = d recovers plain PCA") {
  Rng rng(107);
  Matrix a = test::random_matrix(5, 9, rng);
  SparsePcaInstance inst;
  inst.a = a;
  inst.k = 2;
  inst.s_rows = 5;
  inst.epsilon = 0.5;
  SparsePcaResult res = run_sparse_pca(inst);
  CHECK(res.cost_min == doctest::Approx(svd(a).tail_energy(2)).epsilon(1e-8));
}

TEST_CASE("sparse pca: coordinate instance picks the heavy axis") {
  Matrix a = Matrix::Zero(4, 4);
  a(0, 0) = 1.0;
  a(0, 1) = 1.0;
  a(1, 2) = 1.0;
  a(2, 3) = 1.0;
  SparsePcaInstance inst;
  inst.a = a;
  inst.k = 1;
  inst.s_rows = 1;
  inst.epsilon = 0.5;
  SparsePcaResult res = run_sparse_pca(inst);
  REQUIRE(res.support.size() == 1);
  CHECK(res.support[0] == 0);
  CHECK(res.mass_max == doctest::Approx(2.0));
}

TEST_CASE("sparse pca: additive guarantee against the full enumerator") {
  Rng rng(108);
  for (int inst_idx = 0; inst_idx < 3; ++inst_idx) {
    Matrix a = test::random_matrix(6, 10, rng);
    SparsePcaInstance inst;
    inst.a = a;
    inst.k = 2;
    inst.s_rows = 3;
    inst.epsilon = 0.5;
    SparsePcaResult res = run_sparse_pca(inst);
    OracleReport oracle = sparse_pca_full_enum(a, 2, 3);
    const double tail = svd(a).tail_energy(2);
    CHECK(res.cost_min <= oracle.opt_value + inst.epsilon * tail + 1e-8);

    // Objective consistency.
    CHECK(res.mass_max + res.cost_min ==
          doctest::Approx(a.squaredNorm()).epsilon(1e-8));

    // Identity-coreset run solves on A directly and matches the oracle.
    SparsePcaInstance exact = inst;
    exact.identity_coreset = true;
    SparsePcaResult res_exact = run_sparse_pca(exact);
    CHECK(res_exact.cost_min == doctest::Approx(oracle.opt_value).epsilon(1e-8));
    CHECK(res_exact.support == oracle.support);

    // Rows outside the support are zero.
    for (Index i = 0; i < a.rows(); ++i) {
      const bool in_support =
          std::find(res.support.begin(), res.support.end(), i) !=
          res.support.end();
      if (!in_support) {
        CHECK(res.u.row(i).norm() == 0.0);
      }
    }
  }
}
