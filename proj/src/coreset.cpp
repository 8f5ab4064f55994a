#include "csa/coreset.hpp"

#include "csa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace csa {

Coreset pcps_p2(const Matrix& a, Index k, double epsilon) {
  require_data_matrix(a, "pcps_p2");
  if (k < 1 || k > std::min(a.rows(), a.cols())) {
    throw InvalidParameter("pcps_p2: k must be in [1, min(d, n)]");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidParameter("pcps_p2: epsilon must be in (0, 1)");
  }
  SvdResult dec = svd(a);
  const Index r_target =
      k + static_cast<Index>(std::ceil(static_cast<double>(k) / epsilon));
  const Index r = std::min(r_target, dec.rank);

  Coreset out;
  out.B = dec.left.leftCols(r) * dec.singular_values.head(r).asDiagonal();
  out.epsilon = epsilon;
  out.kind = CoresetKind::OneSidedOffset;
  out.source_rows = a.rows();
  out.source_cols = a.cols();
  out.k = k;
  return out;
}

namespace {

// Column leverage scores tau_i = |V_{i,.}|_2^2 from the thin SVD, mixed with
// the uniform distribution so no column gets vanishing probability.
std::vector<double> column_sampling_probs(const Matrix& a) {
  SvdResult dec = svd(a);
  const Index n = a.cols();
  std::vector<double> probs(static_cast<size_t>(n), 0.0);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double lev = dec.right.row(i).squaredNorm();
    probs[static_cast<size_t>(i)] = lev + 1.0 / static_cast<double>(n);
    total += probs[static_cast<size_t>(i)];
  }
  for (double& p : probs) {
    p /= total;
  }
  return probs;
}

}  // namespace

Coreset coreset_general_p(const Matrix& a, Index k, double epsilon, double p,
                          const GeneralPStrategy& strategy) {
  require_data_matrix(a, "coreset_general_p");
  if (!(p >= 1.0)) {
    throw InvalidParameter("coreset_general_p: p must be >= 1");
  }
  Coreset out;
  out.epsilon = epsilon;
  out.source_rows = a.rows();
  out.source_cols = a.cols();
  out.k = k;

  if (std::holds_alternative<IdentityStrategy>(strategy)) {
    out.B = a;
    out.kind = CoresetKind::Identity;
    return out;
  }

  const auto& sample = std::get<SensitivitySample>(strategy);
  const Index n = a.cols();
  const Index q = std::min<Index>(std::max<Index>(sample.target_size, 1), n);
  out.kind = CoresetKind::Multiplicative;
  if (q == n) {
    // Full sample: every column once with unit weight.
    out.B = a;
    return out;
  }

  const std::vector<double> probs = column_sampling_probs(a);
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  Rng rng(split_seed(sample.seed, "coreset.sensitivity"));
  out.B.resize(a.rows(), q);
  for (Index j = 0; j < q; ++j) {
    const double u = rng.uniform();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    const Index pick = static_cast<Index>(it - cdf.begin());
    const double w = 1.0 / (static_cast<double>(q) * probs[static_cast<size_t>(pick)]);
    out.B.col(j) = std::pow(w, 1.0 / p) * a.col(pick);
  }
  return out;
}

VerificationReport verify_pcps(const Matrix& a, const Matrix& b, Index k,
                               double epsilon, int n_samples,
                               std::uint64_t seed, double tolerance) {
  require_data_matrix(a, "verify_pcps");
  require_data_matrix(b, "verify_pcps");
  if (a.rows() != b.rows()) {
    throw InvalidInput("verify_pcps: A and B must share the ambient dimension");
  }
  if (n_samples < 1) {
    throw InvalidParameter("verify_pcps: n_samples must be >= 1");
  }
  if (tolerance < 0.0) {
    tolerance = 1e-8 * a.squaredNorm();
  }

  SvdResult dec = svd(a);
  VerificationReport report;
  report.n_samples = n_samples;
  report.tail_energy = dec.tail_energy(k);
  report.band_bound = epsilon * report.tail_energy;

  const double norm_a = a.squaredNorm();
  const double norm_b = b.squaredNorm();
  Rng rng(split_seed(seed, "coreset.verify"));
  Matrix g(a.rows(), k);
  for (int s = 0; s < n_samples; ++s) {
    for (Index j = 0; j < g.cols(); ++j) {
      for (Index i = 0; i < g.rows(); ++i) {
        g(i, j) = rng.gaussian();
      }
    }
    Basis u = orthonormalize(g);
    const Matrix ua = u.vectors.transpose() * a;
    const Matrix ub = u.vectors.transpose() * b;
    const double cost_a = norm_a - ua.squaredNorm();
    const double cost_b = norm_b - ub.squaredNorm();
    const double diff = cost_a - cost_b;
    if (s == 0) {
      report.min_diff = report.max_diff = diff;
    } else {
      report.min_diff = std::min(report.min_diff, diff);
      report.max_diff = std::max(report.max_diff, diff);
    }
  }
  report.spread = report.max_diff - report.min_diff;
  report.passed = report.min_diff >= -tolerance &&
                  report.spread <= report.band_bound + tolerance;
  return report;
}

}  // namespace csa
