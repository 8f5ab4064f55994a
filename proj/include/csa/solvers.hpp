#ifndef CSA_SOLVERS_HPP
#define CSA_SOLVERS_HPP

#include "csa/types.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace csa {

// Constraint families for the feasible set of projections. Each variant
// houses one application's feasible family of bases U (the projection is
// U U^T after orthonormalization of the span).
struct Unconstrained {
  Index k = 0;
};

/// dim_in columns constrained to the subspace W, dim_out columns to its
/// orthogonal complement.
struct SubspaceSplit {
  Basis w;  // orthonormal
  Index dim_in = 0;
  Index dim_out = 0;
};

/// Column j must lie in subspaces[j] (unit-capacity partition constraint).
struct Partition {
  std::vector<Basis> subspaces;  // each orthonormal, size k
};

/// U >= 0 entrywise with at most one nonzero per row.
struct NonnegativeRowSparse {
  Index k = 0;
};

/// k-means style cluster-membership structure over coreset rows.
struct Clustering {
  Index k = 0;
  std::vector<double> weights;
};

/// Row-sparse PCA: at most s_rows nonzero rows across U.
struct SparseRows {
  Index k = 0;
  Index s_rows = 0;
};

using ConstraintSpec = std::variant<Unconstrained, SubspaceSplit, Partition,
                                    NonnegativeRowSparse, Clustering, SparseRows>;

struct RegressionSolution {
  Matrix u;  // d x k, feasible for its spec; not necessarily orthonormal
  double cost = 0.0;
  bool feasible = true;
  bool converged = true;  // false only when IRLS hits max_iters
};

/// Unconstrained min_U |B - U C|_F^2 (minimum-norm in U).
RegressionSolution solve_unconstrained(const Matrix& b, const Matrix& c);

/// Exact minimizer of |B - U C|_F^2 with the first dim_in columns of U in W
/// and the remaining dim_out columns in the orthogonal complement of W.
/// Substituting coordinates in bases of W and its complement splits the
/// convex quadratic program into two independent least-squares problems.
RegressionSolution solve_subspace_ls(const Matrix& b, const Matrix& c,
                                     const SubspaceSplit& spec);

struct IrlsOptions {
  int max_iters = 200;
  double rel_tol = 1e-10;
  double floor_scale = 1e-9;  // smoothing floor = floor_scale * column scale
};

/// min_U |B - U C|_{2,p}^p with column j of U in subspaces[j]. p = 2 is
/// solved exactly through one stacked least-squares system with blocks
/// c_{j,i} * P_j; other p >= 1 run iteratively reweighted least squares on
/// the column residual norms.
RegressionSolution solve_partition_lp(const Matrix& b, const Matrix& c,
                                      const Partition& spec, double p,
                                      const IrlsOptions& opts = {});

/// Exact row-separable solve of min |B - W H|_F^2 over nonnegative W with at
/// most one nonzero per row: each row independently picks the best single
/// column j with weight max(0, <b_i, h_j> / |h_j|^2), or stays zero.
/// Runs in O(d k r).
RegressionSolution solve_pnmf_rows(const Matrix& b, const Matrix& h);

/// Cost-only variant of solve_pnmf_rows, allocation-free.
double pnmf_rows_cost(const Matrix& b, const Matrix& h);

struct KmeansCenters {
  Matrix centers;  // k x r
  std::vector<bool> empty_cluster;
};

/// Weighted mean of the points assigned to each cluster; empty clusters get
/// a zero row and a flag.
KmeansCenters solve_kmeans_centers(const Matrix& points_rows,
                                   const std::vector<int>& assignment,
                                   const std::vector<double>& weights, Index k);

struct SparsePcaSolution {
  Matrix u;  // d x k orthonormal, rows outside `support` all zero
  std::vector<Index> support;
  double cost = 0.0;  // |B - U U^T B|_F^2
  double mass = 0.0;  // <B B^T, U U^T>
};

/// Exact row-sparse sparse PCA on B: enumerates all row supports of size
/// s_rows, takes the top-k left singular vectors of the restricted matrix
/// per support, and keeps the support with maximum captured mass. Ties break
/// to the lexicographically smallest support.
SparsePcaSolution solve_sparse_pca_support(const Matrix& b, Index k,
                                           Index s_rows,
                                           std::uint64_t support_budget = 2'000'000);

}  // namespace csa

#endif  // CSA_SOLVERS_HPP
