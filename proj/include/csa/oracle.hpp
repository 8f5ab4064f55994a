#ifndef CSA_ORACLE_HPP
#define CSA_ORACLE_HPP

#include "csa/solvers.hpp"
#include "csa/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace csa {

// Independent brute-force references. These are used by tests and acceptance
// runs only and deliberately avoid the code paths of the modules they audit:
// enumeration and eigensolves are reimplemented here.

enum class OracleMethod {
  ExhaustiveAssignments,
  GridSearch,
  AlternatingRestarts,  // heuristic upper bound, not exact
  SupportEnumeration,
};

struct OracleReport {
  double opt_value = 0.0;
  OracleMethod method = OracleMethod::ExhaustiveAssignments;
  double resolution = 0.0;   // grid methods
  double error_bound = 0.0;  // grid methods: Lipschitz slack added to opt
  std::vector<int> assignment;     // brute_kmeans
  std::vector<Index> support;      // sparse PCA
  std::string note;
};

/// Exact k-means optimum by enumerating all k^n assignments.
OracleReport brute_kmeans(const Matrix& points_rows, Index k,
                          std::uint64_t budget = 20'000'000);

/// Approximate constrained-subspace optimum by a dense angular grid over the
/// feasible unit vectors. Reports its own O(resolution) error bound; callers
/// add it to their tolerances.
OracleReport brute_subspace_grid(const Matrix& a, Index k,
                                 const ConstraintSpec& spec, double resolution,
                                 std::uint64_t budget = 50'000'000);

/// Multi-restart alternating minimization for projective NMF. The value is
/// an upper bound on OPT; tests may only assert inequalities valid for an
/// upper bound.
OracleReport brute_pnmf(const Matrix& a, Index k, int restarts,
                        std::uint64_t seed);

/// Exact row-sparse sparse-PCA optimum on A itself (no coreset), via support
/// enumeration with an independent Jacobi eigensolver on the restricted Gram
/// matrix.
OracleReport sparse_pca_full_enum(const Matrix& a, Index k, Index s_rows,
                                  std::uint64_t budget = 2'000'000);

}  // namespace csa

#endif  // CSA_ORACLE_HPP
