#include "csa/net.hpp"

#include "csa/rng.hpp"

#include <cmath>
#include <limits>

namespace csa {

namespace {

constexpr std::uint64_t kU64Max = std::numeric_limits<std::uint64_t>::max();

}  // namespace

BallNet ball_net(const BallNetSpec& spec) {
  if (spec.dim < 1) {
    throw InvalidParameter("ball_net: dim must be >= 1");
  }
  if (!(spec.radius >= 0.0) || !std::isfinite(spec.radius)) {
    throw InvalidParameter("ball_net: radius must be finite and >= 0");
  }
  if (!(spec.granularity > 0.0 && spec.granularity <= 1.0)) {
    throw InvalidParameter("ball_net: granularity must be in (0, 1]");
  }
  const int dim = spec.dim;
  if (spec.radius == 0.0) {
    return BallNet(spec, std::vector<double>(static_cast<size_t>(dim), 0.0), 1);
  }

  const double radius = spec.radius;
  const double delta = spec.granularity;
  const double spacing = 2.0 * delta * radius / std::sqrt(static_cast<double>(dim));
  const double slack_radius = (1.0 + delta) * radius;
  const long axis_max = static_cast<long>(std::floor(slack_radius / spacing));
  const double slack_sq = slack_radius * slack_radius;

  std::vector<double> flat;
  std::vector<long> m(static_cast<size_t>(dim), -axis_max);
  Index count = 0;
  // Odometer over axes, axis 0 fastest.
  while (true) {
    double norm_sq = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double x = spacing * static_cast<double>(m[static_cast<size_t>(a)]);
      norm_sq += x * x;
    }
    if (norm_sq <= slack_sq) {
      for (int a = 0; a < dim; ++a) {
        flat.push_back(spacing * static_cast<double>(m[static_cast<size_t>(a)]));
      }
      ++count;
    }
    int axis = 0;
    while (axis < dim && m[static_cast<size_t>(axis)] == axis_max) {
      m[static_cast<size_t>(axis)] = -axis_max;
      ++axis;
    }
    if (axis == dim) {
      break;
    }
    ++m[static_cast<size_t>(axis)];
  }
  return BallNet(spec, std::move(flat), count);
}

CoefficientNet::CoefficientNet(std::vector<BallNet> columns, Index k)
    : columns_(std::move(columns)), k_(k) {
  for (const BallNet& bn : columns_) {
    const std::uint64_t c = static_cast<std::uint64_t>(bn.count());
    if (total_count_ > kU64Max / c) {
      total_count_ = kU64Max;
      count_saturated_ = true;
      break;
    }
    total_count_ *= c;
  }
}

void CoefficientNet::set_budget(std::uint64_t budget, std::uint64_t seed) {
  budget_ = budget;
  seed_ = split_seed(seed, "net.sample");
  truncated_ = budget_ != 0 && (count_saturated_ || total_count_ > budget_);
}

std::uint64_t CoefficientNet::enumeration_count() const {
  return truncated_ ? budget_ : total_count_;
}

void CoefficientNet::guess(std::uint64_t index, Matrix& c) const {
  c.resize(k_, r());
  std::uint64_t rest = index;
  for (Index col = 0; col < r(); ++col) {
    const BallNet& bn = columns_[static_cast<size_t>(col)];
    const std::uint64_t count = static_cast<std::uint64_t>(bn.count());
    const Index digit = static_cast<Index>(rest % count);
    rest /= count;
    const double* p = bn.point(digit);
    for (Index row = 0; row < k_; ++row) {
      c(row, col) = p[row];
    }
  }
}

void CoefficientNet::sampled_guess(std::uint64_t ordinal, Matrix& c) const {
  c.resize(k_, r());
  Rng rng(index_seed(seed_, ordinal));
  for (Index col = 0; col < r(); ++col) {
    const BallNet& bn = columns_[static_cast<size_t>(col)];
    const Index digit =
        static_cast<Index>(rng.bounded(static_cast<std::uint64_t>(bn.count())));
    const double* p = bn.point(digit);
    for (Index row = 0; row < k_; ++row) {
      c(row, col) = p[row];
    }
  }
}

void CoefficientNet::enumerated_guess(std::uint64_t ordinal, Matrix& c) const {
  if (truncated_) {
    sampled_guess(ordinal, c);
  } else {
    guess(ordinal, c);
  }
}

std::vector<Index> CoefficientNet::digits(std::uint64_t index) const {
  std::vector<Index> out(static_cast<size_t>(r()), 0);
  std::uint64_t rest = index;
  for (Index col = 0; col < r(); ++col) {
    const std::uint64_t count =
        static_cast<std::uint64_t>(columns_[static_cast<size_t>(col)].count());
    out[static_cast<size_t>(col)] = static_cast<Index>(rest % count);
    rest /= count;
  }
  return out;
}

CoefficientNet coefficient_net(const Matrix& b, Index k, double delta) {
  require_data_matrix(b, "coefficient_net");
  if (k < 1) {
    throw InvalidParameter("coefficient_net: k must be >= 1");
  }
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw InvalidParameter("coefficient_net: delta must be in (0, 1]");
  }
  std::vector<BallNet> columns;
  columns.reserve(static_cast<size_t>(b.cols()));
  for (Index i = 0; i < b.cols(); ++i) {
    BallNetSpec spec;
    spec.dim = static_cast<int>(k);
    spec.radius = b.col(i).norm();
    spec.granularity = delta;
    columns.push_back(ball_net(spec));
  }
  return CoefficientNet(std::move(columns), k);
}

CoefficientNet conditioned_net(const Matrix& b, Index k, double kappa,
                               double epsilon) {
  require_data_matrix(b, "conditioned_net");
  if (!(kappa >= 1.0)) {
    throw InvalidParameter("conditioned_net: kappa must be >= 1");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidParameter("conditioned_net: epsilon must be in (0, 1)");
  }
  std::vector<BallNet> columns;
  columns.reserve(static_cast<size_t>(b.cols()));
  for (Index i = 0; i < b.cols(); ++i) {
    BallNetSpec spec;
    spec.dim = static_cast<int>(k);
    spec.radius = kappa * b.col(i).norm();
    spec.granularity = epsilon / kappa;
    columns.push_back(ball_net(spec));
  }
  return CoefficientNet(std::move(columns), k);
}

NetCursor::NetCursor(const CoefficientNet& net)
    : net_(&net), digits_(static_cast<size_t>(net.r()), 0) {}

void NetCursor::seek(std::uint64_t index) {
  digits_ = net_->digits(index);
}

Index NetCursor::advance() {
  for (Index col = 0; col < net_->r(); ++col) {
    Index& d = digits_[static_cast<size_t>(col)];
    if (d + 1 < net_->column(col).count()) {
      ++d;
      return col;
    }
    d = 0;
  }
  return net_->r();  // wrapped past the end
}

void NetCursor::write(Matrix& c) const {
  c.resize(net_->k(), net_->r());
  for (Index col = 0; col < net_->r(); ++col) {
    const double* p = column_point(col);
    for (Index row = 0; row < net_->k(); ++row) {
      c(row, col) = p[row];
    }
  }
}

}  // namespace csa
