#include "support.hpp"

#include "eotbench/builder.hpp"
#include "eotbench/oracles.hpp"
#include "eotbench/plan.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace eotbench;
using eotbench::testing::random_pair;
using eotbench::testing::rel_err;
using eotbench::testing::single_pair;

namespace {

/// D=1, ε=1, N=2, w=(½,½), b=(−2,2), A=(1,1), source N(0,1).
BenchmarkPair symmetric_two_component() {
  return BenchmarkPair(SourceDistribution::gaussian(Point::Zero(1), SymMatrix::scalar_identity(1, 1.0)),
                       LsePotential::from_weights(1.0, {0.5, 0.5}, {Point::Constant(1, -2.0), Point::Constant(1, 2.0)},
                                                  {SymMatrix::scalar_identity(1, 1.0), SymMatrix::scalar_identity(1, 1.0)}));
}

Point scalar_point(double v) { return Point::Constant(1, v); }

}  // namespace

TEST(ConditionalPlan, ZeroMatrixIsHeatKernel) {
  const auto pair = single_pair(3, 0.0, 1.0, 4.0);
  Point x(3);
  x << 0.3, -1.0, 2.0;
  const auto plan = conditional_plan(pair, x);
  ASSERT_EQ(plan.size(), 1u);
  EXPECT_EQ(plan.gamma(0), 1.0);
  EXPECT_LE((plan.mean(0) - x).norm(), 1e-15);
  EXPECT_LE((plan.covariance(0).covariance().to_dense() - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-15);
}

TEST(ConditionalPlan, SymmetricTwoComponentAtOrigin) {
  const auto plan = conditional_plan(symmetric_two_component(), scalar_point(0.0));
  EXPECT_NEAR(plan.gamma(0), 0.5, 1e-15);
  EXPECT_NEAR(plan.gamma(1), 0.5, 1e-15);
  EXPECT_NEAR(plan.mean(0)[0], -1.0, 1e-15);
  EXPECT_NEAR(plan.mean(1)[0], 1.0, 1e-15);
  EXPECT_NEAR(plan.covariance(0).covariance().scalar_value(), 0.5, 1e-15);
  const auto m = conditional_moments(plan);
  EXPECT_NEAR(m.mean[0], 0.0, 1e-15);
  EXPECT_NEAR(m.covariance.to_dense()(0, 0), 1.5, 1e-14);
}

TEST(ConditionalPlan, TabulatedSixteenDimensionalCovariance) {
  const auto pair = build_mixtures_preset({.dim = 16, .epsilon = 0.1, .seed = 3});
  const auto plan = conditional_plan(pair, Point::Zero(16));
  for (std::size_t n = 0; n < plan.size(); ++n) {
    const auto& cov = plan.covariance(n).covariance();
    ASSERT_TRUE(cov.is_scalar());
    EXPECT_NEAR(cov.scalar_value(), 0.1 * 16.0 / 17.0, 1e-16);
  }
  EXPECT_NEAR(0.1 * 16.0 / 17.0, 0.0941176, 1e-7);
}

TEST(ConditionalPlan, GammaNormalizedAndMeansRecomputed) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pair = random_pair(3, 4, 0.4, seed);
    CounterRng rng(Seed{seed, 5}, 0);
    for (int rep = 0; rep < 10; ++rep) {
      const Point x = 2.0 * rng.normal_vector(3);
      const auto plan = conditional_plan(pair, x);
      double total = 0.0;
      for (std::size_t n = 0; n < plan.size(); ++n) total += plan.gamma(n);
      EXPECT_NEAR(total, 1.0, 1e-12);
      for (std::size_t n = 0; n < plan.size(); ++n) {
        const auto& c = pair.potential().component(n);
        const Eigen::MatrixXd a = c.matrix.to_dense();
        const Point mu = (a + Eigen::MatrixXd::Identity(3, 3)).ldlt().solve(a * c.center + x);
        EXPECT_LE((plan.mean(n) - mu).norm(), 1e-12 * std::max(1.0, mu.norm()));
      }
    }
  }
}

TEST(ConditionalPlan, ScalarAndDenseStorageAgree) {
  const auto scalar_pair = random_pair(2, 3, 0.7, 8, {.dense = false});
  std::vector<LseComponent> dense_comps = scalar_pair.potential().components();
  for (auto& c : dense_comps) c.matrix = SymMatrix::dense(c.matrix.to_dense());
  const BenchmarkPair dense_pair(scalar_pair.source(), LsePotential(0.7, dense_comps));
  Point x(2);
  x << 0.4, -1.3;
  const auto a = conditional_plan(scalar_pair, x);
  const auto b = conditional_plan(dense_pair, x);
  for (std::size_t n = 0; n < a.size(); ++n) {
    EXPECT_NEAR(a.log_gamma()[n], b.log_gamma()[n], 1e-12);
    EXPECT_LE((a.mean(n) - b.mean(n)).norm(), 1e-12);
  }
}

TEST(ConditionalPlan, HighDimensionDoesNotUnderflow) {
  const auto pair = build_mixtures_preset({.dim = 128, .epsilon = 0.1, .seed = 1});
  CounterRng rng(Seed{1, 1}, 0);
  const auto plan = conditional_plan(pair, 0.5 * rng.normal_vector(128));
  double total = 0.0;
  for (std::size_t n = 0; n < plan.size(); ++n) {
    ASSERT_TRUE(std::isfinite(plan.log_gamma()[n]));
    total += plan.gamma(n);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(SampleConditional, StandardNormalMean) {
  const auto pair = single_pair(2, 0.0, 1.0);
  const auto plan = conditional_plan(pair, Point::Zero(2));
  const auto draws = sample_conditional(plan, Seed{5, 0}, 100000);
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 0.02);
}

TEST(SampleConditional, DegenerateGammaPicksFirstComponent) {
  const auto pair = BenchmarkPair(
      SourceDistribution::gaussian(Point::Zero(1), SymMatrix::scalar_identity(1, 1.0)),
      LsePotential::from_weights(1.0, {1.0, 0.0}, {scalar_point(0.0), scalar_point(5.0)},
                                 {SymMatrix::scalar_identity(1, 1.0), SymMatrix::scalar_identity(1, 1.0)}));
  const auto plan = conditional_plan(pair, scalar_point(0.0));
  EXPECT_EQ(plan.gamma(1), 0.0);
  CounterRng rng(Seed{1, 0}, 0);
  for (int i = 0; i < 1000; ++i) {
    std::size_t comp = 99;
    plan.sample(rng, &comp);
    EXPECT_EQ(comp, 0u);
  }
  EXPECT_EQ(plan.pick_component(0.0), 0u);
  EXPECT_EQ(plan.pick_component(0.999999), 0u);
}

TEST(SampleConditional, TwoComponentMixtureMoments) {
  const auto plan = conditional_plan(symmetric_two_component(), scalar_point(0.0));
  const auto draws = sample_conditional(plan, Seed{9, 0}, 100000);
  const double mean = draws.col(0).mean();
  const double var = (draws.col(0).array() - mean).square().sum() / (draws.rows() - 1.0);
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_LT(rel_err(var, 1.5), 0.02);
}

TEST(SampleConditional, DeterministicPerDrawIndex) {
  const auto pair = random_pair(2, 3, 0.5, 1);
  const auto plan = conditional_plan(pair, Point::Ones(2));
  const auto many = sample_conditional(plan, Seed{4, 2}, 50);
  const auto few = sample_conditional(plan, Seed{4, 2}, 10);
  EXPECT_EQ(many.topRows(10), few);
}

TEST(SampleJoint, EmptyCount) {
  const auto js = sample_joint(random_pair(2, 2, 1.0, 0), Seed{1, 0}, 0);
  EXPECT_EQ(js.size(), 0u);
  EXPECT_EQ(js.x.rows(), 0);
}

TEST(SampleJoint, SingleComponentJointCovariance) {
  // y = (a b + x)/(a+1) + N(0, ε/(a+1)), x ~ N(0, s): the joint is Gaussian.
  const double a = 0.5, eps = 0.8, s = 2.0, b = 1.0;
  const auto pair = single_pair(1, a, eps, b, s);
  const auto js = sample_joint(pair, Seed{21, 0}, 100000);
  Eigen::MatrixXd xy(js.size(), 2);
  xy.col(0) = js.x.col(0);
  xy.col(1) = js.y.col(0);
  const Eigen::RowVectorXd mean = xy.colwise().mean();
  const Eigen::MatrixXd centered = xy.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (xy.rows() - 1.0);
  const double k = 1.0 / (a + 1.0);
  const double cxx = s, cxy = k * s, cyy = k * k * s + eps * k;
  EXPECT_LT(rel_err(cov(0, 0), cxx), 0.01);
  EXPECT_LT(rel_err(cov(0, 1), cxy), 0.01);
  EXPECT_LT(rel_err(cov(1, 1), cyy), 0.01);
  EXPECT_NEAR(mean[1], a * b * k, 0.02);
}

TEST(SampleJoint, TargetIsSecondMarginal) {
  const auto pair = random_pair(2, 3, 0.5, 2);
  const auto js = sample_joint(pair, Seed{3, 0}, 200);
  EXPECT_EQ(sample_target(pair, Seed{3, 0}, 200), js.y);
  EXPECT_EQ(sample_source(pair, Seed{3, 0}, 200), js.x);
}

TEST(ConditionalMoments, MatchMonteCarlo) {
  const auto pair = random_pair(2, 3, 0.6, 12);
  Point x(2);
  x << 0.2, 0.9;
  const auto plan = conditional_plan(pair, x);
  const auto m = conditional_moments(plan);
  const auto draws = sample_conditional(plan, Seed{12, 0}, 1000000);
  const Eigen::RowVectorXd mean = draws.colwise().mean();
  const SampleMatrix centered = draws.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (draws.rows() - 1.0);
  const Eigen::MatrixXd exact = m.covariance.to_dense();
  EXPECT_LT((mean.transpose() - m.mean).norm() / std::max(1.0, m.mean.norm()), 0.01);
  EXPECT_LT((cov - exact).norm() / exact.norm(), 0.01);
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(exact).eigenvalues().minCoeff(), 0.0);
}

TEST(TargetMoments, HeatSmoothingOfSource) {
  Point m0(2);
  m0 << 1.0, -0.5;
  Eigen::MatrixXd s0(2, 2);
  s0 << 1.0, 0.3, 0.3, 0.5;
  const double eps = 0.7;
  const BenchmarkPair pair(SourceDistribution::gaussian(m0, SymMatrix::dense(s0)),
                           LsePotential::from_weights(eps, {1.0}, {Point::Zero(2)}, {SymMatrix::scalar_identity(2, 0.0)}));
  const auto tm = target_moments(pair, Seed{1, 0}, 100000);
  const Eigen::MatrixXd expected = s0 + eps * Eigen::MatrixXd::Identity(2, 2);
  EXPECT_LT((tm.mean - m0).norm(), 0.01);
  EXPECT_LT((tm.covariance.to_dense() - expected).norm() / expected.norm(), 0.01);
}

TEST(TargetMoments, SymmetricPresetHasZeroMean) {
  const auto pair = symmetric_two_component();
  const auto tm = target_moments(pair, Seed{2, 0}, 100000);
  EXPECT_NEAR(tm.mean[0], 0.0, 0.02);
}

TEST(TargetMoments, AgreesWithPlainMonteCarlo) {
  const auto pair = build_mixtures_preset({.dim = 2, .epsilon = 1.0, .seed = 0});
  const auto tm = target_moments(pair, Seed{6, 0}, 100000);
  const auto y = sample_target(pair, Seed{7, 0}, 1000000);
  const Eigen::RowVectorXd mean = y.colwise().mean();
  const SampleMatrix centered = y.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / (y.rows() - 1.0);
  const Eigen::MatrixXd exact = tm.covariance.to_dense();
  // Relative to the target scale, the mean is near zero in absolute terms.
  EXPECT_LT((mean.transpose() - tm.mean).norm() / std::sqrt(exact.trace()), 0.01);
  EXPECT_LT((cov - exact).norm() / exact.norm(), 0.01);
}

TEST(ForwardDensity, FlatPotentialExamples) {
  const auto pair = single_pair(2, 0.0, 1.0);
  const Point x = Point::Zero(2);
  EXPECT_EQ(log_forward_density_unnormalized(pair, x, x), 0.0);
  Point y(2);
  y << 1.0, 1.0;
  EXPECT_DOUBLE_EQ(log_forward_density_unnormalized(pair, x, y), -1.0);
}

TEST(ZOracle, FlatPotentialGaussianIntegral) {
  for (double eps : {0.3, 1.0, 2.0}) {
    for (Index d : {1, 2}) {
      const auto pair = single_pair(d, 0.0, eps);
      const double expected = std::pow(2.0 * M_PI * eps, 0.5 * static_cast<double>(d));
      EXPECT_LT(rel_err(z_quadrature_oracle(pair, Point::Constant(d, 0.7)), expected), 1e-9);
    }
  }
}

TEST(ZOracle, SingleQuadraticCompletesSquare) {
  // ∫ exp(−y²/2 − (x−y)²/2) dy = √π · exp(−x²/4).
  const auto pair = single_pair(1, 1.0, 1.0);
  for (double x : {-2.0, 0.0, 0.5, 3.0}) {
    const double expected = std::sqrt(2.0 * M_PI * 0.5) * std::exp(-x * x / 4.0);
    EXPECT_LT(rel_err(z_quadrature_oracle(pair, scalar_point(x)), expected), 1e-9);
  }
}

TEST(ZOracle, FiniteForPresets) {
  for (double eps : {0.1, 1.0, 10.0}) {
    const auto pair = build_mixtures_preset({.dim = 2, .epsilon = eps, .seed = 4});
    CounterRng rng(Seed{4, 4}, 0);
    for (int i = 0; i < 10; ++i) {
      const double log_z = log_z_quadrature_oracle(pair, 0.5 * rng.normal_vector(2));
      EXPECT_TRUE(std::isfinite(log_z));
    }
  }
}

TEST(ForwardDensity, MixtureMatchesNormalizedQuadrature) {
  for (Index d : {1, 2}) {
    const auto pair = random_pair(d, 3, 0.8, 30 + static_cast<std::uint64_t>(d));
    CounterRng rng(Seed{30, static_cast<std::uint64_t>(d)}, 0);
    const Point x = rng.normal_vector(d);
    const auto plan = conditional_plan(pair, x);
    const double log_z = log_z_quadrature_oracle(pair, x);
    for (int i = 0; i < 20; ++i) {
      const Point y = conditional_moments(plan).mean + 1.5 * rng.normal_vector(d);
      const double lhs = std::exp(plan.log_density(y));
      const double rhs = std::exp(log_forward_density_unnormalized(pair, x, y) - log_z);
      EXPECT_LT(rel_err(lhs, rhs), 1e-6) << "d=" << d << " i=" << i;
    }
  }
}

TEST(ReverseDensity, GaussianProductPosterior) {
  const auto pair = single_pair(2, 0.0, 1.0);
  Point y(2);
  y << 1.2, -0.4;
  const auto at_mode = log_reverse_density_unnormalized(pair, y, y / 2.0);
  EXPECT_LT(at_mode.gradient.norm(), 1e-14);
  // The log-density is quadratic with precision 2I.
  Point x(2);
  x << 0.1, 0.5;
  const auto vg = log_reverse_density_unnormalized(pair, y, x);
  EXPECT_LE((vg.gradient - (-2.0) * (x - y / 2.0)).norm(), 1e-13);
  EXPECT_NEAR(vg.value - at_mode.value, -(x - y / 2.0).squaredNorm(), 1e-13);
}

TEST(ReverseDensity, GradientMatchesFiniteDifferences) {
  for (Index d = 1; d <= 4; ++d) {
    const auto pair = random_pair(d, 3, 0.6, 40 + static_cast<std::uint64_t>(d));
    CounterRng rng(Seed{40, static_cast<std::uint64_t>(d)}, 0);
    for (int i = 0; i < 5; ++i) {
      const Point x = rng.normal_vector(d);
      const Point y = rng.normal_vector(d);
      const auto vg = log_reverse_density_unnormalized(pair, y, x);
      for (Index k = 0; k < d; ++k) {
        const double h = 1e-5;
        Point xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const double fd = (log_reverse_density_unnormalized(pair, y, xp).value -
                           log_reverse_density_unnormalized(pair, y, xm).value) / (2.0 * h);
        EXPECT_NEAR(vg.gradient[k], fd, 1e-5);
      }
    }
  }
}

TEST(ReverseDensity, SymmetryMapInvariance) {
  const auto pair = symmetric_two_component();
  for (double x : {-1.0, 0.3, 2.5}) {
    for (double y : {-0.7, 0.0, 1.9}) {
      const double a = log_reverse_density_unnormalized(pair, scalar_point(y), scalar_point(x)).value;
      const double b = log_reverse_density_unnormalized(pair, scalar_point(-y), scalar_point(-x)).value;
      EXPECT_NEAR(a, b, 1e-13);
    }
  }
}

TEST(ReverseDensity, MixtureSourceGradient) {
  std::vector<GaussianComponent> comps = {
      {0.3, Point::Constant(2, -1.0), SymMatrix::scalar_identity(2, 0.5)},
      {0.7, Point::Constant(2, 1.0), SymMatrix::scalar_identity(2, 0.8)}};
  const BenchmarkPair pair(SourceDistribution::mixture(comps), random_pair(2, 2, 1.0, 3).potential());
  Point x(2), y(2);
  x << 0.2, -0.3;
  y << 1.0, 0.5;
  const auto vg = log_reverse_density_unnormalized(pair, y, x);
  for (Index k = 0; k < 2; ++k) {
    Point xp = x, xm = x;
    xp[k] += 1e-5;
    xm[k] -= 1e-5;
    const double fd = (log_reverse_density_unnormalized(pair, y, xp).value -
                       log_reverse_density_unnormalized(pair, y, xm).value) / 2e-5;
    EXPECT_NEAR(vg.gradient[k], fd, 1e-5);
  }
}
