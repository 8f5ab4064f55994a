#include "csa/engine.hpp"

#include "csa/linalg.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace csa;

TEST_CASE("rank-deficient instance is fit within the additive term") {
  Rng rng(80);
  // rank 2 = k, so OPT = 0 and the output must be within the delta bound.
  Matrix a = test::random_matrix(5, 2, rng) * test::random_matrix(2, 12, rng);
  SolveConfig cfg;
  cfg.k = 2;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{2};
  GuessSolver solver = make_guess_solver(spec, 2.0);
  Solution sol = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
  CHECK(sol.exhaustive);
  CHECK(sol.cost_original <= sol.delta_bound + 1e-9);
  CHECK(sol.delta_bound ==
        doctest::Approx((1.0 + 0.5) * a.squaredNorm() * (1.5 * 1.5 - 1.0)));
}

TEST_CASE("framework additive bound against the spectral optimum") {
  Rng rng(81);
  for (int inst = 0; inst < 3; ++inst) {
    Matrix a = test::random_matrix(6, 30, rng);
    SolveConfig cfg;
    cfg.k = 2;
    cfg.epsilon = 0.5;
    cfg.delta = 0.5;  // the acceptance suite runs the pinned delta = 0.25
    cfg.threads = 2;
    ConstraintSpec spec = Unconstrained{2};
    GuessSolver solver = make_guess_solver(spec, 2.0);
    Solution sol = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
    REQUIRE(sol.exhaustive);
    const double opt = svd(a).tail_energy(2);
    const double bound = (1.0 + cfg.epsilon) * opt + sol.delta_bound;
    CHECK(sol.cost_original <= bound + 1e-9);
    CHECK(sol.cost_original <= a.squaredNorm() + 1e-9);
    CHECK(sol.cost_original ==
          doctest::Approx(projection_cost(a, sol.basis, 2.0)).epsilon(1e-8));
  }
}

TEST_CASE("fast and generic scans pick the same winner") {
  Rng rng(82);
  Matrix a = test::random_matrix(5, 10, rng);
  SolveConfig cfg;
  cfg.k = 2;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{2};
  GuessSolver solver = make_guess_solver(spec, 2.0);
  Solution fast = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
  Solution generic =
      coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard, nullptr, true);
  CHECK(fast.best_guess_index == generic.best_guess_index);
  CHECK(fast.best_guess_cost == doctest::Approx(generic.best_guess_cost).epsilon(1e-9));
}

TEST_CASE("budgeted run is truncated but still valid") {
  Rng rng(83);
  Matrix a = test::random_matrix(5, 14, rng);
  SolveConfig cfg;
  cfg.k = 2;
  cfg.epsilon = 0.5;
  cfg.delta = 0.25;
  cfg.budget = 500;
  cfg.seed = 7;
  ConstraintSpec spec = Unconstrained{2};
  GuessSolver solver = make_guess_solver(spec, 2.0);
  Solution sol = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
  CHECK(sol.truncated);
  CHECK_FALSE(sol.exhaustive);
  CHECK(sol.guesses_evaluated == 500);
  CHECK(sol.cost_original <= a.squaredNorm() + 1e-9);
}

TEST_CASE("solution is identical across thread counts") {
  Rng rng(84);
  Matrix a = test::random_matrix(5, 12, rng);
  ConstraintSpec spec = Unconstrained{2};
  GuessSolver solver = make_guess_solver(spec, 2.0);
  Solution reference;
  for (int threads : {1, 2, 4}) {
    SolveConfig cfg;
    cfg.k = 2;
    cfg.epsilon = 0.5;
    cfg.delta = 0.5;
    cfg.threads = threads;
    Solution sol = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
    if (threads == 1) {
      reference = sol;
    } else {
      CHECK(sol.best_guess_index == reference.best_guess_index);
      CHECK(sol.best_guess_cost == reference.best_guess_cost);  // bit-equal
      CHECK(sol.cost_original == reference.cost_original);
      CHECK((sol.basis.vectors - reference.basis.vectors).cwiseAbs().maxCoeff() ==
            0.0);
    }
  }
}

TEST_CASE("winner minimizes the per-guess cost over the whole net (replay)") {
  Rng rng(85);
  Matrix a = test::random_matrix(4, 8, rng);
  SolveConfig cfg;
  cfg.k = 1;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{1};
  // k = 1: the fast path does not apply, use the generic solver path.
  GuessSolver solver;
  solver.solve = [](const Matrix& b, const Matrix& c) {
    return solve_unconstrained(b, c);
  };
  solver.cost = [](const Matrix& b, const Matrix& c) {
    return solve_unconstrained(b, c).cost;
  };
  Solution sol = coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);

  Coreset coreset = pcps_p2(a, 1, 0.5);
  CoefficientNet net = coefficient_net(coreset.B, 1, 0.5);
  REQUIRE(net.total_count() == sol.guesses_evaluated);
  Matrix c;
  double replay_best = 1e300;
  std::uint64_t replay_index = 0;
  for (std::uint64_t i = 0; i < net.total_count(); ++i) {
    net.guess(i, c);
    const double cost = solve_unconstrained(coreset.B, c).cost;
    if (cost < replay_best) {
      replay_best = cost;
      replay_index = i;
    }
  }
  CHECK(replay_index == sol.best_guess_index);
  CHECK(replay_best == doctest::Approx(sol.best_guess_cost).epsilon(1e-10));
  CHECK(sol.cost_coreset <= sol.best_guess_cost + 1e-9);
}

TEST_CASE("solver failures carry the guess index") {
  Rng rng(88);
  Matrix a = test::random_matrix(4, 8, rng);
  SolveConfig cfg;
  cfg.k = 1;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  ConstraintSpec spec = Unconstrained{1};
  GuessSolver solver;
  solver.solve = [](const Matrix& b, const Matrix& c) {
    return solve_unconstrained(b, c);
  };
  solver.cost = [](const Matrix&, const Matrix&) -> double {
    throw InvalidInput("synthetic failure");
  };
  try {
    coreset_guess_solve(a, spec, cfg, solver, NetKind::Standard);
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("guess") != std::string::npos);
    CHECK(std::string(e.what()).find("synthetic failure") != std::string::npos);
  }
}

TEST_CASE("multiplicative delta") {
  DeltaChoice identity = multiplicative_delta(Matrix::Identity(4, 4), 2, 0.5);
  CHECK_FALSE(identity.degenerate);
  CHECK(identity.delta == doctest::Approx(0.25));

  Rng rng(86);
  Matrix low = test::random_matrix(5, 2, rng) * test::random_matrix(2, 9, rng);
  DeltaChoice degenerate = multiplicative_delta(low, 2, 0.5);
  CHECK(degenerate.degenerate);
  CHECK(degenerate.delta == tol::kDeltaMin);

  Matrix a = test::random_matrix(6, 10, rng);
  DeltaChoice generic = multiplicative_delta(a, 2, 0.5);
  const double opt = svd(a).tail_energy(2);
  CHECK(generic.delta * a.squaredNorm() <= 0.5 * opt + 1e-9);
}

TEST_CASE("rank preservation under Gaussian sketching") {
  CHECK(mc_rank_preservation(Matrix::Zero(3, 4), 10, 1) == 1.0);
  CHECK(mc_rank_preservation(Matrix::Identity(4, 4), 50, 2) == 1.0);

  Rng rng(87);
  Matrix m = test::random_matrix(5, 2, rng) * test::random_matrix(2, 6, rng);
  const double freq = mc_rank_preservation(m, 400, 3);
  CHECK(freq >= 0.75);
}
