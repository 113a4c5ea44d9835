#include "support.hpp"

#include "eotbench/builder.hpp"
#include "eotbench/drift.hpp"
#include "eotbench/oracles.hpp"
#include "eotbench/plan.hpp"
#include "eotbench/sde.hpp"

#include <gtest/gtest.h>

using namespace eotbench;
using eotbench::testing::random_pair;
using eotbench::testing::rel_err;
using eotbench::testing::single_pair;

namespace {

struct EmpiricalMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

EmpiricalMoments empirical(const SampleMatrix& s) {
  const Eigen::RowVectorXd mean = s.colwise().mean();
  const SampleMatrix centered = s.rowwise() - mean;
  return {mean.transpose(), centered.transpose() * centered / (s.rows() - 1.0)};
}

SampleMatrix repeat_row(const Point& x, std::size_t count) {
  SampleMatrix m(static_cast<Index>(count), x.size());
  m.rowwise() = x.transpose();
  return m;
}

}  // namespace

TEST(OptimalDrift, ZeroMatrixGivesZeroDrift) {
  const auto pair = single_pair(2, 0.0, 1.3, 2.0);
  CounterRng rng(Seed{1, 0}, 0);
  for (double t : {0.0, 0.3, 0.99}) {
    EXPECT_EQ(optimal_drift(pair, 3.0 * rng.normal_vector(2), t).norm(), 0.0);
  }
}

TEST(OptimalDrift, SingleComponentClosedForm) {
  for (double a : {0.5, 1.0, 3.0}) {
    for (double eps : {0.2, 1.0, 5.0}) {
      const auto pair = single_pair(1, a, eps);
      for (double t : {0.0, 0.25, 0.9}) {
        for (double x : {-2.0, 0.7}) {
          const double expected = -a / ((1.0 - t) * a + 1.0) * x;
          EXPECT_NEAR(optimal_drift(pair, Point::Constant(1, x), t)[0], expected, 1e-13);
        }
      }
    }
  }
  EXPECT_DOUBLE_EQ(optimal_drift(single_pair(1, 1.0, 1.0), Point::Constant(1, 1.0), 0.0)[0], -0.5);
}

TEST(OptimalDrift, RejectsTerminalTime) {
  const auto pair = single_pair(1, 1.0, 1.0);
  EXPECT_THROW(optimal_drift(pair, Point::Zero(1), 1.0), Error);
  EXPECT_THROW(optimal_drift(pair, Point::Zero(1), -0.1), Error);
}

TEST(OptimalDrift, ContinuousTowardsTerminalTime) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pair = random_pair(3, 3, 0.5, seed);
    CounterRng rng(Seed{seed, 3}, 0);
    const Point x = rng.normal_vector(3);
    const Point near = optimal_drift(pair, x, 1.0 - 1e-12);
    const Point far = optimal_drift(pair, x, 1.0 - 1e-6);
    ASSERT_TRUE(near.allFinite());
    EXPECT_LE((near - far).norm(), 1e-5 * std::max(1.0, far.norm()));
  }
}

TEST(OptimalDrift, PerturbedWithZeroOffsetEqualsOptimal) {
  const auto pair = random_pair(2, 3, 0.8, 9);
  const auto opt = DriftField::optimal(pair);
  const auto pert = DriftField::perturbed(opt, Point::Zero(2));
  CounterRng rng(Seed{9, 1}, 0);
  for (int i = 0; i < 20; ++i) {
    const Point x = rng.normal_vector(2);
    const double t = 0.95 * rng.uniform();
    EXPECT_EQ(pert(x, t), opt(x, t));
  }
}

TEST(OptimalDrift, DenseAndScalarStorageAgree) {
  const auto pair = build_mixtures_preset({.dim = 4, .epsilon = 1.0, .seed = 2});
  std::vector<LseComponent> comps = pair.potential().components();
  for (auto& c : comps) c.matrix = SymMatrix::dense(c.matrix.to_dense());
  const BenchmarkPair dense(pair.source(), LsePotential(1.0, comps));
  CounterRng rng(Seed{2, 2}, 0);
  for (int i = 0; i < 10; ++i) {
    const Point x = 2.0 * rng.normal_vector(4);
    const double t = rng.uniform() * 0.99;
    EXPECT_LE((optimal_drift(pair, x, t) - optimal_drift(dense, x, t)).norm(), 1e-12);
  }
}

TEST(DriftOracle, FlatPotentialGivesZero) {
  const auto pair = single_pair(2, 0.0, 1.0);
  EXPECT_LT(drift_quadrature_oracle(pair, Point::Constant(2, 0.4), 0.5).norm(), 1e-8);
}

TEST(DriftOracle, AgreesWithClosedForm) {
  for (Index d : {1, 2}) {
    const auto pair = random_pair(d, 3, 0.7, 50 + static_cast<std::uint64_t>(d));
    CounterRng rng(Seed{50, static_cast<std::uint64_t>(d)}, 0);
    for (double t : {0.0, 0.5, 0.9}) {
      const Point x = rng.normal_vector(d);
      const Point closed = optimal_drift(pair, x, t);
      const Point oracle = drift_quadrature_oracle(pair, x, t);
      EXPECT_LE((closed - oracle).norm(), 1e-4 * std::max(1.0, oracle.norm())) << "d=" << d << " t=" << t;
    }
  }
}

TEST(Simulate, ZeroDriftIsWienerProcess) {
  const auto drift = DriftField::zero(2);
  const auto x1 = simulate_endpoints(drift, SampleMatrix::Zero(100000, 2), 1.0, 200, Seed{3, 0});
  const auto m = empirical(x1);
  EXPECT_LT(rel_err(m.cov(0, 0), 1.0), 0.01);
  EXPECT_LT(rel_err(m.cov(1, 1), 1.0), 0.01);
}

TEST(Simulate, SingleStepIsOneEulerStep) {
  const auto pair = single_pair(1, 1.0, 1.0);
  SampleMatrix x0(1, 1);
  x0 << 2.0;
  const auto trajs = simulate_sb(DriftField::optimal(pair), x0, 1.0, 1, Seed{4, 0});
  ASSERT_EQ(trajs.size(), 1u);
  ASSERT_EQ(trajs[0].states.rows(), 2);
  ASSERT_EQ(trajs[0].times, (std::vector<double>{0.0, 1.0}));
  CounterRng rng(Seed{4, 0}, 0);
  const double noise = rng.normal();
  EXPECT_DOUBLE_EQ(trajs[0].states(1, 0), 2.0 + (-1.0) + noise);
}

TEST(Simulate, EndpointsMatchFullTrajectories) {
  const auto pair = random_pair(2, 2, 0.5, 6);
  const auto x0 = sample_source(pair, Seed{6, 0}, 50);
  const auto drift = DriftField::optimal(pair);
  const auto trajs = simulate_sb(drift, x0, 0.5, 20, Seed{6, 1});
  const auto ends = simulate_endpoints(drift, x0, 0.5, 20, Seed{6, 1});
  for (std::size_t p = 0; p < trajs.size(); ++p) {
    EXPECT_EQ(trajs[p].states.row(20), ends.row(static_cast<Index>(p)));
  }
}

TEST(Simulate, NonFiniteStateIsFlagged) {
  const auto blowup = DriftField::custom(
      [](const Point& x, double t) -> Point { return t > 0.45 ? Point(x * 1e308 * 1e308) : Point(x * 0.0); }, 1);
  SimulationSummary summary;
  const auto ends = simulate_endpoints(blowup, SampleMatrix::Ones(3, 1), 1.0, 10, Seed{1, 0}, &summary);
  EXPECT_EQ(summary.failed, 3u);
  EXPECT_TRUE(std::isnan(ends(0, 0)));
  const auto trajs = simulate_sb(blowup, SampleMatrix::Ones(1, 1), 1.0, 10, Seed{1, 0});
  ASSERT_TRUE(trajs[0].failed_at.has_value());
  EXPECT_EQ(*trajs[0].failed_at, 6u);
  EXPECT_TRUE(std::isfinite(trajs[0].states(5, 0)));
}

TEST(Simulate, EndpointLawAtFixedSource) {
  const auto pair = build_mixtures_preset({.dim = 2, .epsilon = 1.0, .seed = 0});
  Point x(2);
  x << 0.3, -0.2;
  const auto exact = conditional_moments(conditional_plan(pair, x));
  const auto ends = simulate_endpoints(DriftField::optimal(pair), repeat_row(x, 100000), 1.0, 200, Seed{8, 0});
  const auto m = empirical(ends);
  const Eigen::MatrixXd cov = exact.covariance.to_dense();
  const double scale = std::sqrt(cov.trace());
  EXPECT_LT((m.mean - exact.mean).norm() / std::max(exact.mean.norm(), scale), 0.02);
  EXPECT_LT((m.cov - cov).norm() / cov.norm(), 0.02);
}

TEST(Simulate, DiscretizationBiasShrinksWithSteps) {
  // For a single isotropic component the Euler mean is exact (the step
  // factors telescope), so the bias shows up in the variance. A strong
  // contraction (a = 8) makes it large enough to dominate Monte-Carlo noise.
  const auto pair = single_pair(1, 8.0, 0.5, 0.0);
  const Point x = Point::Constant(1, 3.0);
  const double exact = conditional_moments(conditional_plan(pair, x)).covariance.to_dense()(0, 0);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t steps : {16, 32, 64}) {
    const auto ends = simulate_endpoints(DriftField::optimal(pair), repeat_row(x, 200000), 0.5, steps, Seed{9, 0});
    const double err = std::abs(empirical(ends).cov(0, 0) / exact - 1.0);
    EXPECT_LT(err, previous) << "steps=" << steps;
    previous = err;
  }
}

TEST(BrownianBridge, PinnedEndpoints) {
  Point x(2), y(2);
  x << 1.0, -2.0;
  y << 0.5, 4.0;
  EXPECT_EQ(brownian_bridge_sample(x, y, 0.0, 1.0, Seed{1, 0}), x);
  EXPECT_EQ(brownian_bridge_sample(x, y, 1.0, 1.0, Seed{1, 0}), y);
  EXPECT_THROW(brownian_bridge_sample(x, y, 1.5, 1.0, Seed{1, 0}), Error);
}

TEST(BrownianBridge, InteriorMoments) {
  Point x(2), y(2);
  x << 1.0, -2.0;
  y << 0.5, 4.0;
  const double eps = 0.6;
  for (double t : {0.3, 0.5}) {
    SampleMatrix s(100000, 2);
    for (Index i = 0; i < s.rows(); ++i) {
      CounterRng rng(Seed{2, 0}, static_cast<std::uint64_t>(i));
      s.row(i) = brownian_bridge_sample(x, y, t, eps, rng).transpose();
    }
    const auto m = empirical(s);
    const Point expected_mean = x + t * (y - x);
    const double expected_var = eps * t * (1.0 - t);
    EXPECT_LT((m.mean - expected_mean).norm(), 4.0 * std::sqrt(2.0 * expected_var / 1e5));
    EXPECT_LT(rel_err(m.cov(0, 0), expected_var), 0.02);
    EXPECT_LT(rel_err(m.cov(1, 1), expected_var), 0.02);
  }
}

TEST(ExactTrajectory, EndpointGridReducesToJointDraw) {
  const auto pair = random_pair(2, 3, 0.5, 11);
  const auto js = sample_joint(pair, Seed{11, 0}, 5);
  for (std::size_t i = 0; i < 5; ++i) {
    const auto traj = sample_sb_trajectory_exact(pair, Seed{11, 0}, {0.0, 1.0}, i);
    EXPECT_EQ(traj.states.row(0), js.x.row(static_cast<Index>(i)));
    EXPECT_EQ(traj.states.row(1), js.y.row(static_cast<Index>(i)));
  }
}

TEST(ExactTrajectory, RejectsBadGrid) {
  const auto pair = random_pair(1, 1, 1.0, 1);
  EXPECT_THROW(sample_sb_trajectory_exact(pair, Seed{1, 0}, {0.0, 0.5}), Error);
  EXPECT_THROW(sample_sb_trajectory_exact(pair, Seed{1, 0}, {0.0, 0.6, 0.4, 1.0}), Error);
}

TEST(ExactTrajectory, AgreesWithEulerMaruyamaAtIntermediateTimes) {
  const auto pair = build_mixtures_preset({.dim = 2, .epsilon = 1.0, .seed = 0});
  const std::size_t paths = 50000, steps = 200;
  const auto grid = uniform_grid(steps);
  const auto exact = sample_sb_trajectories_exact(pair, Seed{12, 0}, grid, paths);
  const auto x0 = sample_source(pair, Seed{13, 0}, paths);
  const auto em = simulate_sb(DriftField::optimal(pair), x0, 1.0, steps, Seed{13, 1});
  for (std::size_t k : {50, 100, 150}) {
    SampleMatrix a(static_cast<Index>(paths), 2), b(static_cast<Index>(paths), 2);
    for (std::size_t p = 0; p < paths; ++p) {
      a.row(static_cast<Index>(p)) = exact[p].states.row(static_cast<Index>(k));
      b.row(static_cast<Index>(p)) = em[p].states.row(static_cast<Index>(k));
    }
    const auto ma = empirical(a), mb = empirical(b);
    const double scale = std::sqrt(ma.cov.trace());
    EXPECT_LT((ma.mean - mb.mean).norm() / scale, 0.03) << "k=" << k;
    EXPECT_LT((ma.cov - mb.cov).norm() / ma.cov.norm(), 0.03) << "k=" << k;
  }
}
