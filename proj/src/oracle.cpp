#include "csa/oracle.hpp"

#include "csa/linalg.hpp"
#include "csa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csa {

namespace {

double pow_count(double base, Index exp) {
  double v = 1.0;
  for (Index i = 0; i < exp; ++i) {
    v *= base;
  }
  return v;
}

}  // namespace

OracleReport brute_kmeans(const Matrix& points_rows, Index k,
                          std::uint64_t budget) {
  require_data_matrix(points_rows, "brute_kmeans");
  const Index n = points_rows.rows();
  if (k < 1 || k > n) {
    throw InvalidParameter("brute_kmeans: k must be in [1, n]");
  }
  if (pow_count(static_cast<double>(k), n) > static_cast<double>(budget)) {
    throw Overflow("brute_kmeans: k^n exceeds the enumeration budget");
  }

  Vector sq_norms(n);
  for (Index i = 0; i < n; ++i) {
    sq_norms[i] = points_rows.row(i).squaredNorm();
  }
  const double total_sq = sq_norms.sum();

  std::vector<int> assignment(static_cast<size_t>(n), 0);
  std::vector<int> best_assignment = assignment;
  double best_cost = std::numeric_limits<double>::infinity();
  Matrix sums(k, points_rows.cols());
  std::vector<int> counts(static_cast<size_t>(k), 0);

  while (true) {
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Index i = 0; i < n; ++i) {
      const int j = assignment[static_cast<size_t>(i)];
      sums.row(j) += points_rows.row(i);
      ++counts[static_cast<size_t>(j)];
    }
    // cost = sum |x_i|^2 - sum_j |s_j|^2 / n_j with mean centers
    double captured = 0.0;
    for (Index j = 0; j < k; ++j) {
      if (counts[static_cast<size_t>(j)] > 0) {
        captured += sums.row(j).squaredNorm() /
                    static_cast<double>(counts[static_cast<size_t>(j)]);
      }
    }
    const double cost = total_sq - captured;
    if (cost < best_cost) {
      best_cost = cost;
      best_assignment = assignment;
    }
    Index pos = 0;
    while (pos < n && assignment[static_cast<size_t>(pos)] == k - 1) {
      assignment[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) {
      break;
    }
    ++assignment[static_cast<size_t>(pos)];
  }

  OracleReport report;
  report.opt_value = std::max(best_cost, 0.0);
  report.method = OracleMethod::ExhaustiveAssignments;
  report.assignment = best_assignment;
  return report;
}

namespace {

/// Unit vectors on S^{m-1} from a spherical-coordinate grid with angular
/// step `resolution`.
std::vector<Vector> sphere_grid(Index m, double resolution) {
  std::vector<Vector> out;
  if (m < 1) {
    return out;
  }
  if (m == 1) {
    Vector plus(1), minus(1);
    plus[0] = 1.0;
    minus[0] = -1.0;
    out.push_back(plus);
    out.push_back(minus);
    return out;
  }
  const double pi = 3.14159265358979323846;
  std::vector<Index> steps(static_cast<size_t>(m) - 1);
  for (Index i = 0; i + 1 < m; ++i) {
    const double span = (i + 2 == m) ? 2.0 * pi : pi;
    steps[static_cast<size_t>(i)] =
        std::max<Index>(1, static_cast<Index>(std::ceil(span / resolution)));
  }
  std::vector<Index> idx(static_cast<size_t>(m) - 1, 0);
  while (true) {
    Vector v(m);
    double sin_prod = 1.0;
    for (Index i = 0; i + 1 < m; ++i) {
      const double span = (i + 2 == m) ? 2.0 * pi : pi;
      const double angle = span * static_cast<double>(idx[static_cast<size_t>(i)]) /
                           static_cast<double>(steps[static_cast<size_t>(i)]);
      v[i] = sin_prod * std::cos(angle);
      sin_prod *= std::sin(angle);
    }
    v[m - 1] = sin_prod;
    out.push_back(v);
    Index pos = 0;
    while (pos + 1 < m && idx[static_cast<size_t>(pos)] + 1 ==
                              steps[static_cast<size_t>(pos)]) {
      idx[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos + 1 == m) {
      break;
    }
    ++idx[static_cast<size_t>(pos)];
  }
  return out;
}

Matrix complement_of(const Basis& w) {
  const Index d = w.ambient_dim();
  Eigen::HouseholderQR<Matrix> qr(w.vectors);
  Matrix q = qr.householderQ();
  return q.rightCols(d - w.dim());
}

double span_cost_p2(const Matrix& a, const Matrix& columns) {
  if (columns.cols() == 0 || columns.isZero(0.0)) {
    return a.squaredNorm();
  }
  Basis basis = orthonormalize(columns);
  const Matrix proj = basis.vectors.transpose() * a;
  return a.squaredNorm() - proj.squaredNorm();
}

}  // namespace

OracleReport brute_subspace_grid(const Matrix& a, Index k,
                                 const ConstraintSpec& spec, double resolution,
                                 std::uint64_t budget) {
  require_data_matrix(a, "brute_subspace_grid");
  if (!(resolution > 0.0)) {
    throw InvalidParameter("brute_subspace_grid: resolution must be positive");
  }

  // Per-column candidate unit vectors mapped into the ambient space.
  std::vector<std::vector<Vector>> candidates;
  if (const auto* split = std::get_if<SubspaceSplit>(&spec)) {
    if (split->dim_in > 0) {
      std::vector<Vector> in_w;
      for (const Vector& s : sphere_grid(split->w.dim(), resolution)) {
        in_w.push_back(split->w.vectors * s);
      }
      for (Index i = 0; i < split->dim_in; ++i) {
        candidates.push_back(in_w);
      }
    }
    if (split->dim_out > 0) {
      Matrix perp = complement_of(split->w);
      std::vector<Vector> out_w;
      for (const Vector& s : sphere_grid(perp.cols(), resolution)) {
        out_w.push_back(perp * s);
      }
      for (Index i = 0; i < split->dim_out; ++i) {
        candidates.push_back(out_w);
      }
    }
  } else if (const auto* part = std::get_if<Partition>(&spec)) {
    for (const Basis& s : part->subspaces) {
      std::vector<Vector> dirs;
      for (const Vector& u : sphere_grid(s.dim(), resolution)) {
        dirs.push_back(s.vectors * u);
      }
      candidates.push_back(std::move(dirs));
    }
  } else {
    throw InvalidParameter(
        "brute_subspace_grid: only SubspaceSplit and Partition families");
  }

  double total = 1.0;
  for (const auto& c : candidates) {
    if (c.empty()) {
      throw InvalidInput("brute_subspace_grid: a column has no feasible directions");
    }
    total *= static_cast<double>(c.size());
  }
  if (total > static_cast<double>(budget)) {
    throw Overflow("brute_subspace_grid: grid of size " + std::to_string(total) +
                   " exceeds budget");
  }

  const Index cols = static_cast<Index>(candidates.size());
  Matrix u(a.rows(), cols);
  std::vector<size_t> idx(static_cast<size_t>(cols), 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (Index c = 0; c < cols; ++c) {
      u.col(c) = candidates[static_cast<size_t>(c)][idx[static_cast<size_t>(c)]];
    }
    best = std::min(best, span_cost_p2(a, u));
    Index pos = 0;
    while (pos < cols && idx[static_cast<size_t>(pos)] + 1 ==
                             candidates[static_cast<size_t>(pos)].size()) {
      idx[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == cols) {
      break;
    }
    ++idx[static_cast<size_t>(pos)];
  }

  OracleReport report;
  report.opt_value = std::max(best, 0.0);
  report.method = OracleMethod::GridSearch;
  report.resolution = resolution;
  report.error_bound = 4.0 * static_cast<double>(k) * resolution * a.squaredNorm();
  return report;
}

OracleReport brute_pnmf(const Matrix& a, Index k, int restarts,
                        std::uint64_t seed) {
  require_data_matrix(a, "brute_pnmf");
  if (k < 1 || restarts < 1) {
    throw InvalidParameter("brute_pnmf: k and restarts must be >= 1");
  }
  const Index d = a.rows();
  const Index n = a.cols();
  Rng rng(split_seed(seed, "oracle.pnmf"));
  double best = a.squaredNorm();

  Matrix w(d, k), h(k, n);
  for (int restart = 0; restart < restarts; ++restart) {
    // Random row-support initialization with positive entries.
    w.setZero();
    for (Index i = 0; i < d; ++i) {
      const Index j = static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(k)));
      w(i, j) = 0.25 + rng.uniform();
    }
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100; ++iter) {
      // H-step: columns of W are disjointly supported, so the pseudo-inverse
      // is column-wise normalization.
      for (Index j = 0; j < k; ++j) {
        const double nsq = w.col(j).squaredNorm();
        if (nsq > 0.0) {
          h.row(j) = (w.col(j).transpose() * a) / nsq;
        } else {
          h.row(j).setZero();
        }
      }
      // W-step: per-row best single nonnegative multiple.
      for (Index i = 0; i < d; ++i) {
        const double base = a.row(i).squaredNorm();
        double best_res = base;
        Index best_j = -1;
        double best_lambda = 0.0;
        for (Index j = 0; j < k; ++j) {
          const double hn = h.row(j).squaredNorm();
          if (hn <= 0.0) {
            continue;
          }
          const double dot = a.row(i).dot(h.row(j));
          const double lambda = std::max(0.0, dot / hn);
          const double res = base - 2.0 * lambda * dot + lambda * lambda * hn;
          if (res < best_res) {
            best_res = res;
            best_j = j;
            best_lambda = lambda;
          }
        }
        w.row(i).setZero();
        if (best_j >= 0 && best_lambda > 0.0) {
          w(i, best_j) = best_lambda;
        }
      }
      const double cost = (a - w * h).squaredNorm();
      if (std::abs(prev - cost) <= 1e-12 * std::max(1.0, cost)) {
        prev = cost;
        break;
      }
      prev = cost;
    }
    best = std::min(best, prev);
  }

  OracleReport report;
  report.opt_value = std::max(best, 0.0);
  report.method = OracleMethod::AlternatingRestarts;
  report.note = "heuristic upper bound on OPT";
  return report;
}

namespace {

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations,
/// sorted in nonincreasing order. Independent of the SVD-based paths used
/// by the solvers.
std::vector<double> jacobi_eigenvalues(Matrix s) {
  const Index n = s.rows();
  const double off_tol = 1e-13 * std::max(1.0, s.norm());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        off += s(p, q) * s(p, q);
      }
    }
    if (std::sqrt(2.0 * off) < off_tol) {
      break;
    }
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(s(p, q)) < 1e-300) {
          continue;
        }
        const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Index i = 0; i < n; ++i) {
          const double sip = s(i, p);
          const double siq = s(i, q);
          s(i, p) = c * sip - sn * siq;
          s(i, q) = sn * sip + c * siq;
        }
        for (Index i = 0; i < n; ++i) {
          const double spi = s(p, i);
          const double sqi = s(q, i);
          s(p, i) = c * spi - sn * sqi;
          s(q, i) = sn * spi + c * sqi;
        }
      }
    }
  }
  std::vector<double> eig(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    eig[static_cast<size_t>(i)] = s(i, i);
  }
  std::sort(eig.begin(), eig.end(), std::greater<double>());
  return eig;
}

bool next_support(std::vector<Index>& comb, Index n) {
  const Index s = static_cast<Index>(comb.size());
  Index i = s - 1;
  while (i >= 0 && comb[static_cast<size_t>(i)] == n - s + i) {
    --i;
  }
  if (i < 0) {
    return false;
  }
  ++comb[static_cast<size_t>(i)];
  for (Index j = i + 1; j < s; ++j) {
    comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j) - 1] + 1;
  }
  return true;
}

}  // namespace

OracleReport sparse_pca_full_enum(const Matrix& a, Index k, Index s_rows,
                                  std::uint64_t budget) {
  require_data_matrix(a, "sparse_pca_full_enum");
  const Index d = a.rows();
  if (k < 1 || s_rows < k || s_rows > d) {
    throw InvalidParameter("sparse_pca_full_enum: need 1 <= k <= s_rows <= d");
  }
  double n_supports = 1.0;
  for (Index i = 0; i < s_rows; ++i) {
    n_supports *= static_cast<double>(d - i) / static_cast<double>(i + 1);
  }
  if (n_supports > static_cast<double>(budget)) {
    throw Overflow("sparse_pca_full_enum: support enumeration exceeds budget");
  }

  const Matrix gram = a * a.transpose();  // d x d
  std::vector<Index> support(static_cast<size_t>(s_rows));
  for (Index i = 0; i < s_rows; ++i) {
    support[static_cast<size_t>(i)] = i;
  }
  double best_mass = -1.0;
  std::vector<Index> best_support;
  Matrix restricted(s_rows, s_rows);
  do {
    for (Index i = 0; i < s_rows; ++i) {
      for (Index j = 0; j < s_rows; ++j) {
        restricted(i, j) = gram(support[static_cast<size_t>(i)],
                                support[static_cast<size_t>(j)]);
      }
    }
    const std::vector<double> eig = jacobi_eigenvalues(restricted);
    double mass = 0.0;
    for (Index i = 0; i < k && i < static_cast<Index>(eig.size()); ++i) {
      mass += std::max(eig[static_cast<size_t>(i)], 0.0);
    }
    if (mass > best_mass) {
      best_mass = mass;
      best_support = support;
    }
  } while (next_support(support, d));

  OracleReport report;
  report.opt_value = std::max(a.squaredNorm() - best_mass, 0.0);
  report.method = OracleMethod::SupportEnumeration;
  report.support = best_support;
  report.note = "opt_value is the minimization objective; captured mass = "
                "|A|_F^2 - opt_value";
  return report;
}

}  // namespace csa
