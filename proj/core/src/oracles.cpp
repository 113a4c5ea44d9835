#include "eotbench/oracles.hpp"

#include "eotbench/plan.hpp"
#include "eotbench/potential.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace eotbench {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;

// A Gaussian bump used only to decide where panels go.
struct Bump {
  Point mean;
  Eigen::MatrixXd cov;
};

constexpr double kExtent = 11.0;      // half-width in marginal standard deviations
constexpr double kPanelWidth = 3.0;   // in the narrowest standard deviation

std::vector<double> breakpoints(const std::vector<Bump>& bumps, Index coord, double pad) {
  std::vector<double> pts;
  for (const auto& b : bumps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.cov);
    const double narrow = std::sqrt(std::max(es.eigenvalues().minCoeff(), 1e-300));
    const double sd = std::sqrt(b.cov(coord, coord));
    const double lo = b.mean[coord] - kExtent * sd - pad;
    const double hi = b.mean[coord] + kExtent * sd + pad;
    const double width = kPanelWidth * narrow;
    const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / width));
    for (std::size_t k = 0; k <= panels; ++k) {
      pts.push_back(std::min(hi, lo + static_cast<double>(k) * width));
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

template <class F>
Integral integrate_panels(F&& f, const std::vector<double>& pts) {
  Integral total;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    double err = 0.0;
    total.value += Rule::integrate(f, pts[k], pts[k + 1], 0, 0.0, &err);
    total.error += err;
  }
  return total;
}

// ∫ exp(g(y) − shift) dy over the panel grid, in one or two dimensions.
template <class G>
Integral integrate(G&& g, const std::vector<std::vector<double>>& grid, double shift) {
  if (grid.size() == 1) {
    return integrate_panels(
        [&](double y0) {
          Point y(1);
          y[0] = y0;
          return std::exp(g(y) - shift);
        },
        grid[0]);
  }
  double inner_error = 0.0;
  Integral outer = integrate_panels(
      [&](double y0) {
        const Integral inner = integrate_panels(
            [&](double y1) {
              Point y(2);
              y << y0, y1;
              return std::exp(g(y) - shift);
            },
            grid[1]);
        inner_error = std::max(inner_error, inner.value > 0.0 ? inner.error / inner.value : 0.0);
        return inner.value;
      },
      grid[0]);
  outer.error += inner_error * outer.value;
  return outer;
}

void require_small_dim(const BenchmarkPair& pair) {
  require(pair.dim() <= 2, ErrorCode::kInvalidArgument,
          "quadrature oracles support dimension 1 and 2 only");
}

double checked_log(const Integral& r, double shift, double rel_tol, const char* what) {
  if (!(r.value > 0.0) || !std::isfinite(r.value)) {
    throw Error(ErrorCode::kQuadrature, std::string(what) + ": integral is not positive and finite");
  }
  if (r.error > rel_tol * r.value) {
    throw Error(ErrorCode::kQuadrature, std::string(what) + ": estimated relative error " +
                                            std::to_string(r.error / r.value) + " above tolerance");
  }
  return shift + std::log(r.value);
}

}  // namespace

double log_z_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                               double rel_tol) {
  require_small_dim(pair);
  require_dim(x.size(), pair.dim(), "oracle point");
  const double eps = pair.epsilon();
  const Point xp = x;
  auto g = [&](const Point& y) { return log_forward_density_unnormalized(pair, xp, y); };

  // The integrand is a Gaussian mixture in y with covariance ε(Aₙ + I)⁻¹
  // around (Aₙ + I)⁻¹(Aₙ bₙ + x); recomputed here from Aₙ directly.
  std::vector<Bump> bumps;
  double shift = -std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(pair.dim(), pair.dim());
  for (const auto& c : pair.potential().components()) {
    if (!std::isfinite(c.log_weight)) continue;
    const Eigen::MatrixXd a = c.matrix.to_dense();
    const Eigen::MatrixXd resolvent = (a + id).inverse();
    Bump b{resolvent * (a * c.center + xp), eps * resolvent};
    b.cov = 0.5 * (b.cov + b.cov.transpose());
    shift = std::max(shift, g(b.mean));
    bumps.push_back(std::move(b));
  }
  std::vector<std::vector<double>> grid;
  for (Index i = 0; i < pair.dim(); ++i) grid.push_back(breakpoints(bumps, i, 0.0));
  return checked_log(integrate(g, grid, shift), shift, rel_tol, "normalizer quadrature");
}

double z_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                           double rel_tol) {
  return std::exp(log_z_quadrature_oracle(pair, x, rel_tol));
}

Point drift_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                              double t, double rel_tol) {
  require_small_dim(pair);
  require_dim(x.size(), pair.dim(), "oracle point");
  require(t >= 0.0 && t < 1.0, ErrorCode::kInvalidArgument, "drift time must lie in [0, 1)");
  const double eps = pair.epsilon();
  const double s = 1.0 - t;
  const Index d = pair.dim();
  const double h = 1e-5 * (1.0 + x.norm());

  // Mass of y ↦ exp(f(y)/ε) N(y | x, sεI) sits near the product bumps with
  // precision (Aₙ + I/s)/ε. Placement uses the unshifted x plus a margin h.
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  const Point x0 = x;
  std::vector<Bump> bumps;
  for (const auto& c : pair.potential().components()) {
    if (!std::isfinite(c.log_weight)) continue;
    const Eigen::MatrixXd a = c.matrix.to_dense();
    const Eigen::MatrixXd prec = a + id / s;
    const Eigen::MatrixXd cov = eps * prec.inverse();
    Bump b{prec.inverse() * (a * c.center + x0 / s), 0.5 * (cov + cov.transpose())};
    bumps.push_back(std::move(b));
  }
  std::vector<std::vector<double>> grid;
  for (Index i = 0; i < d; ++i) grid.push_back(breakpoints(bumps, i, h));

  auto log_g = [&](const Point& at, const Point& y) {
    return schrodinger_potential_log(pair.potential(), y) - (y - at).squaredNorm() / (2.0 * s * eps);
  };
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& b : bumps) shift = std::max(shift, log_g(x0, b.mean));

  Point v(d);
  for (Index i = 0; i < d; ++i) {
    Point plus = x0;
    Point minus = x0;
    plus[i] += h;
    minus[i] -= h;
    const double lp = checked_log(integrate([&](const Point& y) { return log_g(plus, y); }, grid, shift),
                                  shift, rel_tol, "drift quadrature");
    const double lm = checked_log(integrate([&](const Point& y) { return log_g(minus, y); }, grid, shift),
                                  shift, rel_tol, "drift quadrature");
    v[i] = eps * (lp - lm) / (2.0 * h);
  }
  return v;
}

ScalarMoments reverse_moments_quadrature_oracle(const BenchmarkPair& pair, double y, double rel_tol) {
  require(pair.dim() == 1, ErrorCode::kInvalidArgument, "reverse moment oracle is one-dimensional");
  Point yp(1);
  yp[0] = y;
  // x ↦ source(x) π(y | x), with π(y | x) the mixture density at y.
  auto g = [&](double x) {
    Point xp(1);
    xp[0] = x;
    return pair.source().log_density(xp) + conditional_plan(pair, xp).log_density(yp);
  };

  // Mass lies within the source support; the likelihood in x is no narrower
  // than sqrt(ε (1 + min λ)).
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double narrow = std::numeric_limits<double>::infinity();
  for (const auto& c : pair.source().components()) {
    const double sd = std::sqrt(c.covariance.to_dense()(0, 0));
    lo = std::min(lo, c.mean[0] - 14.0 * sd);
    hi = std::max(hi, c.mean[0] + 14.0 * sd);
    narrow = std::min(narrow, sd);
  }
  for (const auto& c : pair.potential().components()) {
    narrow = std::min(narrow, std::sqrt(pair.epsilon() * (1.0 + c.matrix.min_eigenvalue())));
  }
  std::vector<double> pts;
  const double width = narrow;
  for (double p = lo; p < hi; p += width) pts.push_back(p);
  pts.push_back(hi);

  double shift = -std::numeric_limits<double>::infinity();
  for (double p : pts) shift = std::max(shift, g(p));
  const Integral m0 = integrate_panels([&](double x) { return std::exp(g(x) - shift); }, pts);
  const Integral m1 = integrate_panels([&](double x) { return x * std::exp(g(x) - shift); }, pts);
  checked_log(m0, shift, rel_tol, "reverse moment quadrature");
  const double mean = m1.value / m0.value;
  const Integral m2 = integrate_panels(
      [&](double x) { return (x - mean) * (x - mean) * std::exp(g(x) - shift); }, pts);
  return {mean, m2.value / m0.value};
}

}  // namespace eotbench
