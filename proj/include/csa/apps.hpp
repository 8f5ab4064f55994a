#ifndef CSA_APPS_HPP
#define CSA_APPS_HPP

#include "csa/engine.hpp"
#include "csa/types.hpp"

#include <cstdint>
#include <vector>

namespace csa {

// ---------------------------------------------------------------------------
// Constrained subspace estimation: rank-k subspace intersecting the model
// subspace W in at least l_min dimensions.

struct CseInstance {
  Matrix a;
  Basis w;  // orthonormalized on entry if not already
  Index k = 1;
  Index l_min = 0;
  double epsilon = 0.5;
  double delta = 0.5;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CseCase {
  Index intersection_dim = 0;  // exact dim(V cap W) targeted by this case
  double cost_original = 0.0;
  bool exhaustive = false;
};

struct CseResult {
  Solution solution;          // best over cases, basis completed to rank k
  std::vector<CseCase> cases;
  Index chosen_case = 0;      // intersection dimension of the winner
};

CseResult run_cse(const CseInstance& inst);

/// Number of principal cosines between span(u) and span(w) at least
/// 1 - tol::kOrth (both bases orthonormal).
Index intersection_dimension(const Basis& u, const Basis& w);

// ---------------------------------------------------------------------------
// Partition-constrained lp subspace approximation.

struct PcsaGroup {
  Basis subspace;
  Index capacity = 1;
};

struct PcsaInstance {
  Matrix a;
  std::vector<PcsaGroup> groups;
  double p = 2.0;
  double epsilon = 0.5;
  std::vector<double> kappa_schedule = {1.0, 2.0, 4.0, 8.0};
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  GeneralPStrategy general_p_strategy = IdentityStrategy{};
};

struct PcsaKappaTrace {
  double kappa = 1.0;
  double cost_original = 0.0;
  bool exhaustive = false;
};

struct PcsaResult {
  Solution solution;
  Matrix selected_vectors;  // d x k, column j in its unit-capacity subspace
  std::vector<PcsaKappaTrace> kappa_trace;
  double chosen_kappa = 1.0;
};

PcsaResult run_pcsa(const PcsaInstance& inst);

// ---------------------------------------------------------------------------
// Projective NMF.

struct PnmfInstance {
  Matrix a;
  Index k = 1;
  double epsilon = 0.5;
  double delta = 0.25;
  bool multiplicative = false;  // derive delta from the spectrum instead
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PnmfResult {
  Solution solution;  // basis nonnegative orthonormal, <=1 nonzero per row
  double delta_used = 0.0;
  bool delta_degenerate = false;
};

PnmfResult run_pnmf(const PnmfInstance& inst);

// ---------------------------------------------------------------------------
// k-means.

struct RowCoresetNone {};
struct RowCoresetSample {
  Index q = 0;
  std::uint64_t seed = 0;
};
using RowCoreset = std::variant<RowCoresetNone, RowCoresetSample>;

struct KmeansInstance {
  Matrix points;  // n x d, rows are points
  Index k = 1;
  double epsilon = 0.5;
  RowCoreset row_coreset = RowCoresetNone{};
  std::uint64_t enumeration_budget = 20'000'000;
};

struct KmeansResult {
  Matrix centers;  // k x d, in the original space
  std::vector<int> assignment;  // nearest returned center per input point
  double cost = 0.0;            // on the original points
  double cost_reduced = 0.0;    // best enumeration cost on the reduced rows
  std::vector<bool> empty_cluster;
  Index reduced_dim = 0;
  std::uint64_t assignments_evaluated = 0;
};

KmeansResult run_kmeans(const KmeansInstance& inst);

// ---------------------------------------------------------------------------
// Sparse PCA (row-sparse variant).

struct SparsePcaInstance {
  Matrix a;
  Index k = 1;
  Index s_rows = 1;
  double epsilon = 0.5;
  bool identity_coreset = false;  // solve on A itself (oracle cross-checks)
  std::uint64_t support_budget = 2'000'000;
};

struct SparsePcaResult {
  Matrix u;  // d x k orthonormal, nonzero rows within `support`
  std::vector<Index> support;
  double cost_min = 0.0;  // |A - U U^T A|_F^2
  double mass_max = 0.0;  // <A A^T, U U^T>
  Index coreset_cols = 0;
};

SparsePcaResult run_sparse_pca(const SparsePcaInstance& inst);

}  // namespace csa

#endif  // CSA_APPS_HPP
