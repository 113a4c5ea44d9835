#include "eotbench/drift.hpp"

#include <cmath>
#include <limits>

namespace eotbench {

namespace {

void check_time(double t) {
  if (!(t >= 0.0 && t < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "drift time must lie in [0, 1), got " + std::to_string(t));
  }
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Point optimal_drift(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                    double t) {
  require_dim(x.size(), pair.dim(), "drift argument");
  check_time(t);
  const double eps = pair.epsilon();
  const double s = 1.0 - t;
  const auto& comps = pair.potential().components();
  const std::size_t n = comps.size();
  const double dim = static_cast<double>(pair.dim());

  // Bᵗ has eigenvalues λ / (ε((1−t)λ + 1)) and log det Σᵗ = Σ log(ε / ((1−t)λ + 1)).
  // Scalar components reuse the same (x − b) in both passes, so only the
  // logits are stored.
  thread_local std::vector<double> logits;
  thread_local std::vector<double> b_scalar;
  logits.assign(n, kNegInf);
  b_scalar.assign(n, 0.0);
  std::vector<Point> dense_grads;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& c = comps[k];
    if (c.log_weight == kNegInf) continue;
    const Spectrum& spec = pair.cache(k).spectrum;
    double log_det = 0.0;
    double quad = 0.0;
    if (spec.scalar) {
      const double l = spec.values[0];
      const double b = l / (eps * (s * l + 1.0));
      log_det = dim * std::log(eps / (s * l + 1.0));
      quad = b * (x - c.center).squaredNorm();
      b_scalar[k] = b;
    } else {
      if (dense_grads.empty()) dense_grads.resize(n);
      const Eigen::ArrayXd shrink = s * spec.values.array() + 1.0;
      log_det = (eps / shrink).log().sum();
      const Eigen::VectorXd z = spec.vectors.transpose() * (x - c.center);
      const Eigen::VectorXd bz = (spec.values.array() / (eps * shrink) * z.array()).matrix();
      dense_grads[k] = -(spec.vectors * bz);
      quad = z.dot(bz);
    }
    logits[k] = c.log_weight + 0.5 * log_det - 0.5 * quad;
  }
  double top = kNegInf;
  for (double l : logits) top = std::max(top, l);
  double norm = 0.0;
  for (double l : logits) {
    if (l != kNegInf) norm += std::exp(l - top);
  }
  Point v = Point::Zero(pair.dim());
  for (std::size_t k = 0; k < n; ++k) {
    if (logits[k] == kNegInf) continue;
    const double r = std::exp(logits[k] - top) / norm;
    if (r == 0.0) continue;
    if (pair.cache(k).spectrum.scalar) {
      v.noalias() -= (r * b_scalar[k]) * (x - comps[k].center);
    } else {
      v.noalias() += r * dense_grads[k];
    }
  }
  v *= eps;
  return v;
}

DriftField DriftField::optimal(BenchmarkPair pair) { return DriftField(Optimal{std::move(pair)}); }

DriftField DriftField::custom(Function function, Index dim) {
  require(static_cast<bool>(function), ErrorCode::kInvalidArgument, "custom drift is empty");
  require(dim >= 1, ErrorCode::kInvalidArgument, "drift dimension must be positive");
  return DriftField(Custom{std::move(function), dim});
}

DriftField DriftField::zero(Index dim) {
  return custom([dim](const Point&, double) { return Point::Zero(dim); }, dim);
}

DriftField DriftField::perturbed(DriftField base, Point offset) {
  require_dim(offset.size(), base.dim(), "drift offset");
  return DriftField(
      Perturbed{std::make_shared<const DriftField>(std::move(base)), std::move(offset)});
}

Index DriftField::dim() const {
  return std::visit(
      [](const auto& v) -> Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Optimal>) {
          return v.pair.dim();
        } else if constexpr (std::is_same_v<T, Custom>) {
          return v.dim;
        } else {
          return v.base->dim();
        }
      },
      variant_);
}

Point DriftField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const {
  check_time(t);
  return std::visit(
      [&](const auto& v) -> Point {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Optimal>) {
          return optimal_drift(v.pair, x, t);
        } else if constexpr (std::is_same_v<T, Custom>) {
          Point out = v.function(Point(x), t);
          require_dim(out.size(), v.dim, "custom drift output");
          return out;
        } else {
          return (*v.base)(x, t) + v.offset;
        }
      },
      variant_);
}

}  // namespace eotbench
