#include "support.hpp"

#include "eotbench/builder.hpp"
#include "eotbench/mala.hpp"
#include "eotbench/oracles.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

using namespace eotbench;
using eotbench::testing::rel_err;
using eotbench::testing::single_pair;

namespace {

double standard_normal(const Point& x, Point& grad) {
  grad = -x;
  return -0.5 * x.squaredNorm();
}

double mean_of(const SampleMatrix& s, Index col = 0) { return s.col(col).mean(); }

double var_of(const SampleMatrix& s, Index col = 0) {
  const double m = mean_of(s, col);
  return (s.col(col).array() - m).square().sum() / (s.rows() - 1.0);
}

}  // namespace

TEST(MalaChain, StandardNormalTarget) {
  const auto r = mala_chain(standard_normal, Point::Zero(1), 0.1, 100000, Seed{1, 0});
  EXPECT_LT(std::abs(mean_of(r.samples)), 0.03);
  EXPECT_LT(rel_err(var_of(r.samples), 1.0), 0.03);
  EXPECT_EQ(r.diagnostics.steps_taken, 100000u);
}

TEST(MalaChain, VanishingStepAcceptsEverything) {
  const auto r = mala_chain(standard_normal, Point::Constant(2, 0.5), 1e-8, 1000, Seed{2, 0});
  EXPECT_GE(r.diagnostics.acceptance_rate, 0.999);
}

TEST(MalaChain, BurnInDropsLeadingStates) {
  const auto full = mala_chain(standard_normal, Point::Zero(1), 0.1, 50, Seed{3, 0});
  const auto cut = mala_chain(standard_normal, Point::Zero(1), 0.1, 50, Seed{3, 0}, 20);
  ASSERT_EQ(cut.samples.rows(), 30);
  EXPECT_EQ(cut.samples, full.samples.bottomRows(30));
}

TEST(MalaChain, NonFiniteStartRejected) {
  auto bad = [](const Point& x, Point& grad) {
    grad = x;
    return std::numeric_limits<double>::infinity();
  };
  EXPECT_THROW(mala_chain(bad, Point::Zero(1), 0.1, 10, Seed{1, 0}), Error);
}

TEST(MalaChain, NonFiniteGradientReportsStep) {
  auto target = [](const Point& x, Point& grad) {
    grad = -x;
    if (std::abs(x[0]) > 0.5) grad[0] = std::numeric_limits<double>::quiet_NaN();
    return -0.5 * x.squaredNorm();
  };
  try {
    mala_chain(target, Point::Zero(1), 1.0, 1000, Seed{1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(MalaChain, BimodalOccupancy) {
  // ½N(−2, ½) + ½N(2, ½): well separated but with a crossable saddle.
  auto bimodal = [](const Point& x, Point& grad) {
    const double a = -(x[0] + 2.0) * (x[0] + 2.0);
    const double b = -(x[0] - 2.0) * (x[0] - 2.0);
    const double m = std::max(a, b);
    const double wa = std::exp(a - m), wb = std::exp(b - m);
    grad.resize(1);
    grad[0] = (wa * (-2.0 * (x[0] + 2.0)) + wb * (-2.0 * (x[0] - 2.0))) / (wa + wb);
    return m + std::log(wa + wb);
  };
  const auto r = mala_chain(bimodal, Point::Zero(1), 0.3, 1000000, Seed{4, 0});
  const double right = (r.samples.col(0).array() > 0.0).cast<double>().mean();
  EXPECT_NEAR(right, 0.5, 0.05 * 0.5);
}

TEST(MalaChain, StationaryHistogramChiSquare) {
  const auto r = mala_chain(standard_normal, Point::Zero(1), 0.5, 1000000, Seed{5, 0});
  // Thin to approximately independent draws before the chi-square test.
  const Index thin = 20;
  const Index n = r.samples.rows() / thin;
  const int bins = 50;
  const double lo = -3.0, hi = 3.0, width = (hi - lo) / bins;
  std::vector<double> counts(bins + 2, 0.0);
  for (Index i = 0; i < n; ++i) {
    const double v = r.samples(i * thin, 0);
    const int b = v < lo ? 0 : v >= hi ? bins + 1 : 1 + static_cast<int>((v - lo) / width);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  boost::math::normal_distribution<double> nd;
  double chi2 = 0.0;
  for (int b = 0; b < bins + 2; ++b) {
    const double a = b == 0 ? -INFINITY : lo + (b - 1) * width;
    const double c = b == bins + 1 ? INFINITY : lo + b * width;
    const double pa = std::isinf(a) ? 0.0 : boost::math::cdf(nd, a);
    const double pc = std::isinf(c) ? 1.0 : boost::math::cdf(nd, c);
    const double expected = static_cast<double>(n) * (pc - pa);
    chi2 += (counts[static_cast<std::size_t>(b)] - expected) * (counts[static_cast<std::size_t>(b)] - expected) / expected;
  }
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(bins + 1), chi2));
  EXPECT_GT(p, 0.001) << "chi2=" << chi2;
}

TEST(ReverseSampler, GaussianProductPosterior) {
  const auto pair = single_pair(2, 0.0, 1.0);
  Point y(2);
  y << 1.0, -0.6;
  MalaConfig cfg;
  cfg.step_size = 1e-3;
  cfg.steps = 10000;
  cfg.burn_in = 2000;
  // Pooled post-burn-in states of independent chains started at source draws.
  SampleMatrix ys(1, 2);
  ys.row(0) = y.transpose();
  const auto states = sample_reverse_batch(pair, ys, 400, cfg, Seed{6, 0}, false);
  for (Index k = 0; k < 2; ++k) {
    EXPECT_LT(std::abs(mean_of(states, k) - y[k] / 2.0), 0.05 * std::max(std::abs(y[k] / 2.0), std::sqrt(0.5)));
    EXPECT_LT(rel_err(var_of(states, k), 0.5), 0.05);
  }
}

TEST(ReverseSampler, ExplicitStartIsUsed) {
  const auto pair = single_pair(1, 0.0, 1.0);
  MalaConfig cfg;
  cfg.steps = 1;
  cfg.step_size = 1e-12;
  cfg.init = Point::Constant(1, 3.0);
  const auto r = sample_reverse_conditional(pair, Point::Constant(1, 0.0), cfg, Seed{1, 0});
  EXPECT_NEAR(r.final_state()[0], 3.0, 1e-5);
}

TEST(ReverseSampler, OneDimensionalPresetAgainstQuadrature) {
  const auto pair = build_mixtures_preset({.dim = 1, .epsilon = 1.0, .seed = 2});
  const double y = 2.0;
  const auto exact = reverse_moments_quadrature_oracle(pair, y);
  MalaConfig cfg;
  cfg.step_size = 0.05;
  cfg.steps = 400;
  SampleMatrix ys(1, 1);
  ys << y;
  const auto finals = sample_reverse_batch(pair, ys, 20000, cfg, Seed{7, 0}, true);
  const double sd = std::sqrt(exact.variance);
  EXPECT_LT(std::abs(mean_of(finals) - exact.mean), 0.02 * std::max(std::abs(exact.mean), sd));
  EXPECT_LT(rel_err(var_of(finals), exact.variance), 0.04);
}

TEST(ReverseSampler, DefaultStepAcceptanceOnPreset) {
  const auto pair = build_mixtures_preset({.dim = 2, .epsilon = 1.0, .seed = 0});
  const auto cfg = default_mala_config(1.0);
  EXPECT_DOUBLE_EQ(cfg.step_size, 1e-4);
  EXPECT_EQ(cfg.steps, 200u);
  const auto paired = sample_reverse_paired(pair, Seed{8, 0}, 200, cfg);
  double acc = 0.0;
  for (const auto& d : paired.diagnostics) acc += d.acceptance_rate;
  acc /= static_cast<double>(paired.diagnostics.size());
  // The band [0.3, 0.9] is the stated sanity range for the default step. At
  // η = 1e-4 the proposal is far narrower than the reverse posterior, so the
  // measured rate sits near 1; the check is kept as stated.
  EXPECT_GE(acc, 0.3);
  EXPECT_LE(acc, 0.9) << "mean acceptance " << acc;
}

TEST(ReverseSampler, DefaultStepScalesWithEpsilon) {
  EXPECT_DOUBLE_EQ(default_mala_step_size(10.0), 1e-3);
  EXPECT_DOUBLE_EQ(default_mala_step_size(1.0), 1e-4);
  EXPECT_DOUBLE_EQ(default_mala_step_size(0.1), 1e-5);
}
