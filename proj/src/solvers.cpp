#include "csa/solvers.hpp"

#include "csa/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csa {

namespace {

double column_pow_cost(const Matrix& residual, double p) {
  if (p == 2.0) {
    return residual.squaredNorm();
  }
  double total = 0.0;
  for (Index i = 0; i < residual.cols(); ++i) {
    total += std::pow(residual.col(i).norm(), p);
  }
  return total;
}

/// Orthonormal basis of the orthogonal complement of an orthonormal W.
Matrix complement_basis(const Matrix& w) {
  const Index d = w.rows();
  if (w.cols() == 0) {
    return Matrix::Identity(d, d);
  }
  Eigen::HouseholderQR<Matrix> qr(w);
  Matrix q = qr.householderQ();
  return q.rightCols(d - w.cols());
}

}  // namespace

RegressionSolution solve_unconstrained(const Matrix& b, const Matrix& c) {
  if (c.cols() != b.cols()) {
    throw InvalidInput("solve_unconstrained: C and B column counts differ");
  }
  // min_U |B - U C|_F = min over rows; transpose to a standard LS in U^T.
  Matrix ut = least_squares(c.transpose(), b.transpose());
  RegressionSolution out;
  out.u = ut.transpose();
  out.cost = (b - out.u * c).squaredNorm();
  return out;
}

RegressionSolution solve_subspace_ls(const Matrix& b, const Matrix& c,
                                     const SubspaceSplit& spec) {
  const Index d = b.rows();
  const Index k = spec.dim_in + spec.dim_out;
  if (c.rows() != k || c.cols() != b.cols()) {
    throw InvalidInput("solve_subspace_ls: C dimensions inconsistent");
  }
  if (!spec.w.orthonormal || spec.w.ambient_dim() != d) {
    throw InvalidInput("solve_subspace_ls: W must be orthonormal in R^d");
  }
  const Index w_dim = spec.w.dim();
  if (spec.dim_in > w_dim || spec.dim_out > d - w_dim || spec.dim_in < 0 ||
      spec.dim_out < 0) {
    throw InvalidInput("solve_subspace_ls: split exceeds subspace dimensions");
  }

  RegressionSolution out;
  out.u = Matrix::Zero(d, k);
  // Substituting u_i = P_W x_i and v_j = P_perp y_j decouples the objective:
  // |B - U C|^2 = |P_W^T B - X C_top|^2 + |P_perp^T B - Y C_bot|^2 + const,
  // two plain least-squares problems.
  if (spec.dim_in > 0) {
    const Matrix& pw = spec.w.vectors;
    const Matrix c_top = c.topRows(spec.dim_in);
    Matrix xt = least_squares(c_top.transpose(), (pw.transpose() * b).transpose());
    out.u.leftCols(spec.dim_in) = pw * xt.transpose();
  }
  if (spec.dim_out > 0) {
    Matrix perp = complement_basis(spec.w.vectors);
    const Matrix c_bot = c.bottomRows(spec.dim_out);
    Matrix yt = least_squares(c_bot.transpose(), (perp.transpose() * b).transpose());
    out.u.rightCols(spec.dim_out) = perp * yt.transpose();
  }
  out.cost = (b - out.u * c).squaredNorm();
  return out;
}

namespace {

struct StackedPartition {
  Matrix p;              // (r*d) x s_total, blocks c(j,i) * P_j
  std::vector<Index> offsets;  // column offset of each subspace block
  Index s_total = 0;
};

StackedPartition build_stacked(const Matrix& b, const Matrix& c,
                               const Partition& spec) {
  const Index d = b.rows();
  const Index r = b.cols();
  const Index k = static_cast<Index>(spec.subspaces.size());
  StackedPartition st;
  st.offsets.resize(static_cast<size_t>(k) + 1, 0);
  for (Index j = 0; j < k; ++j) {
    st.offsets[static_cast<size_t>(j) + 1] =
        st.offsets[static_cast<size_t>(j)] + spec.subspaces[static_cast<size_t>(j)].dim();
  }
  st.s_total = st.offsets.back();
  st.p = Matrix::Zero(r * d, st.s_total);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < k; ++j) {
      const Basis& sj = spec.subspaces[static_cast<size_t>(j)];
      st.p.block(i * d, st.offsets[static_cast<size_t>(j)], d, sj.dim()) =
          c(j, i) * sj.vectors;
    }
  }
  return st;
}

RegressionSolution assemble_partition_solution(const Matrix& b, const Matrix& c,
                                               const Partition& spec,
                                               const Vector& x,
                                               const StackedPartition& st,
                                               double p) {
  const Index d = b.rows();
  const Index k = static_cast<Index>(spec.subspaces.size());
  RegressionSolution out;
  out.u = Matrix::Zero(d, k);
  for (Index j = 0; j < k; ++j) {
    const Basis& sj = spec.subspaces[static_cast<size_t>(j)];
    out.u.col(j) = sj.vectors * x.segment(st.offsets[static_cast<size_t>(j)], sj.dim());
  }
  out.cost = column_pow_cost(b - out.u * c, p);
  return out;
}

}  // namespace

RegressionSolution solve_partition_lp(const Matrix& b, const Matrix& c,
                                      const Partition& spec, double p,
                                      const IrlsOptions& opts) {
  if (!(p >= 1.0)) {
    throw InvalidParameter("solve_partition_lp: p must be >= 1");
  }
  const Index k = static_cast<Index>(spec.subspaces.size());
  if (c.rows() != k || c.cols() != b.cols()) {
    throw InvalidInput("solve_partition_lp: C dimensions inconsistent");
  }
  for (const Basis& s : spec.subspaces) {
    if (!s.orthonormal || s.ambient_dim() != b.rows() || s.dim() == 0) {
      throw InvalidInput("solve_partition_lp: subspaces must be nonempty orthonormal bases");
    }
  }

  const Index d = b.rows();
  const Index r = b.cols();
  StackedPartition st = build_stacked(b, c, spec);
  Vector b_stacked(r * d);
  for (Index i = 0; i < r; ++i) {
    b_stacked.segment(i * d, d) = b.col(i);
  }

  if (p == 2.0) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(st.p);
    Vector x = cod.solve(b_stacked);
    return assemble_partition_solution(b, c, spec, x, st, p);
  }

  // IRLS over column residual norms: weight w_i = max(|res_i|, eta)^(p-2).
  double scale = 0.0;
  for (Index i = 0; i < r; ++i) {
    scale = std::max(scale, b.col(i).norm());
  }
  const double eta = opts.floor_scale * std::max(scale, 1.0);

  Vector x = Vector::Zero(st.s_total);
  {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(st.p);
    x = cod.solve(b_stacked);
  }
  RegressionSolution best = assemble_partition_solution(b, c, spec, x, st, p);
  best.converged = false;
  double prev_cost = best.cost;
  Matrix weighted(r * d, st.s_total);
  Vector rhs(r * d);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    RegressionSolution current = assemble_partition_solution(b, c, spec, x, st, p);
    Matrix residual = b - current.u * c;
    for (Index i = 0; i < r; ++i) {
      const double rn = std::max(residual.col(i).norm(), eta);
      const double w = std::sqrt(std::pow(rn, p - 2.0));
      weighted.middleRows(i * d, d) = w * st.p.middleRows(i * d, d);
      rhs.segment(i * d, d) = w * b.col(i);
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(weighted);
    x = cod.solve(rhs);
    RegressionSolution next = assemble_partition_solution(b, c, spec, x, st, p);
    if (next.cost < best.cost) {
      best = next;
      best.converged = false;
    }
    const double denom = std::max({prev_cost, next.cost, 1e-300});
    if (std::abs(prev_cost - next.cost) <= opts.rel_tol * denom) {
      best.converged = true;
      break;
    }
    prev_cost = next.cost;
  }
  return best;
}

RegressionSolution solve_pnmf_rows(const Matrix& b, const Matrix& h) {
  const Index d = b.rows();
  const Index r = b.cols();
  const Index k = h.rows();
  if (h.cols() != r) {
    throw InvalidInput("solve_pnmf_rows: H and B column counts differ");
  }
  Vector h_norms_sq(k);
  for (Index j = 0; j < k; ++j) {
    h_norms_sq[j] = h.row(j).squaredNorm();
  }
  RegressionSolution out;
  out.u = Matrix::Zero(d, k);
  double cost = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double base = b.row(i).squaredNorm();
    double best_res = base;  // all-zero row
    Index best_j = -1;
    double best_lambda = 0.0;
    for (Index j = 0; j < k; ++j) {
      double lambda = 0.0;
      if (h_norms_sq[j] > 0.0) {
        lambda = std::max(0.0, b.row(i).dot(h.row(j)) / h_norms_sq[j]);
      }
      // |b_i - lambda h_j|^2 = |b_i|^2 - 2 lambda <b_i,h_j> + lambda^2 |h_j|^2
      const double res = base - 2.0 * lambda * b.row(i).dot(h.row(j)) +
                         lambda * lambda * h_norms_sq[j];
      if (res < best_res) {
        best_res = res;
        best_j = j;
        best_lambda = lambda;
      }
    }
    if (best_j >= 0 && best_lambda > 0.0) {
      out.u(i, best_j) = best_lambda;
    }
    cost += best_res;
  }
  out.cost = cost;
  return out;
}

double pnmf_rows_cost(const Matrix& b, const Matrix& h) {
  const Index d = b.rows();
  const Index r = b.cols();
  const Index k = h.rows();
  double cost = 0.0;
  for (Index i = 0; i < d; ++i) {
    double base = 0.0;
    for (Index t = 0; t < r; ++t) {
      base += b(i, t) * b(i, t);
    }
    double best_res = base;
    for (Index j = 0; j < k; ++j) {
      double dot = 0.0;
      double hn = 0.0;
      for (Index t = 0; t < r; ++t) {
        dot += b(i, t) * h(j, t);
        hn += h(j, t) * h(j, t);
      }
      if (hn > 0.0 && dot > 0.0) {
        const double res = base - dot * dot / hn;
        if (res < best_res) {
          best_res = res;
        }
      }
    }
    cost += best_res;
  }
  return cost;
}

KmeansCenters solve_kmeans_centers(const Matrix& points_rows,
                                   const std::vector<int>& assignment,
                                   const std::vector<double>& weights, Index k) {
  const Index q = points_rows.rows();
  const Index r = points_rows.cols();
  if (static_cast<Index>(assignment.size()) != q ||
      static_cast<Index>(weights.size()) != q) {
    throw InvalidInput("solve_kmeans_centers: assignment/weights size mismatch");
  }
  KmeansCenters out;
  out.centers = Matrix::Zero(k, r);
  out.empty_cluster.assign(static_cast<size_t>(k), true);
  Vector mass = Vector::Zero(k);
  for (Index i = 0; i < q; ++i) {
    const int j = assignment[static_cast<size_t>(i)];
    if (j < 0 || j >= k) {
      throw InvalidInput("solve_kmeans_centers: cluster id out of range");
    }
    out.centers.row(j) += weights[static_cast<size_t>(i)] * points_rows.row(i);
    mass[j] += weights[static_cast<size_t>(i)];
  }
  for (Index j = 0; j < k; ++j) {
    if (mass[j] > 0.0) {
      out.centers.row(j) /= mass[j];
      out.empty_cluster[static_cast<size_t>(j)] = false;
    }
  }
  return out;
}

namespace {

bool next_combination(std::vector<Index>& comb, Index n) {
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

double binomial(Index n, Index s) {
  double v = 1.0;
  for (Index i = 0; i < s; ++i) {
    v *= static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return v;
}

/// Completes an s x m orthonormal block to s x k by Gram-Schmidt against
/// coordinate vectors. Requires k <= s.
Matrix complete_orthonormal(const Matrix& partial, Index k) {
  const Index s = partial.rows();
  Matrix out(s, k);
  Index have = partial.cols();
  out.leftCols(have) = partial;
  for (Index cand = 0; cand < s && have < k; ++cand) {
    Vector v = Vector::Zero(s);
    v[cand] = 1.0;
    v -= out.leftCols(have) * (out.leftCols(have).transpose() * v);
    const double n = v.norm();
    if (n > 1e-10) {
      out.col(have) = v / n;
      ++have;
    }
  }
  if (have < k) {
    throw InvalidInput("complete_orthonormal: could not complete basis");
  }
  return out;
}

}  // namespace

SparsePcaSolution solve_sparse_pca_support(const Matrix& b, Index k,
                                           Index s_rows,
                                           std::uint64_t support_budget) {
  const Index d = b.rows();
  if (k < 1 || s_rows < k || s_rows > d) {
    throw InvalidParameter("solve_sparse_pca_support: need 1 <= k <= s_rows <= d");
  }
  const double n_supports = binomial(d, s_rows);
  if (n_supports > static_cast<double>(support_budget)) {
    throw Overflow("solve_sparse_pca_support: support enumeration of size " +
                   std::to_string(n_supports) +
                   " exceeds budget; use smaller d or s_rows");
  }

  const double total = b.squaredNorm();
  SparsePcaSolution best;
  best.mass = -1.0;

  std::vector<Index> support(static_cast<size_t>(s_rows));
  for (Index i = 0; i < s_rows; ++i) {
    support[static_cast<size_t>(i)] = i;
  }
  Matrix restricted(s_rows, b.cols());
  do {
    for (Index i = 0; i < s_rows; ++i) {
      restricted.row(i) = b.row(support[static_cast<size_t>(i)]);
    }
    Eigen::JacobiSVD<Matrix> dec(restricted,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = dec.singularValues();
    const Index available = std::min<Index>(k, sv.size());
    double mass = 0.0;
    for (Index i = 0; i < available; ++i) {
      mass += sv[i] * sv[i];
    }
    if (mass > best.mass) {
      Matrix u_restricted = dec.matrixU().leftCols(available);
      if (available < k) {
        u_restricted = complete_orthonormal(u_restricted, k);
      }
      best.u = Matrix::Zero(d, k);
      for (Index i = 0; i < s_rows; ++i) {
        best.u.row(support[static_cast<size_t>(i)]) = u_restricted.row(i);
      }
      best.support = support;
      best.mass = mass;
      best.cost = total - mass;
    }
  } while (next_combination(support, d));
  return best;
}

}  // namespace csa
