#pragma once

#include "eotbench/pair.hpp"

namespace eotbench {

/// π(·|x) = Σₙ γₙ(x) N(μₙ(x), Σₙ) for one source point x.
///
/// γₙ ∝ w̃ₙ(x) = wₙ (2π)^{D/2} √det Σₙ · Q(x | bₙ, Bₙ) is formed in log space;
/// the (2π)^{D/2} √det Σₙ factor underflows in double precision around D = 64.
class ConditionalPlanMixture {
 public:
  ConditionalPlanMixture(const BenchmarkPair& pair, Point x);

  const Point& x() const { return x_; }
  Index dim() const { return x_.size(); }
  std::size_t size() const { return log_gamma_.size(); }

  const std::vector<double>& log_gamma() const { return log_gamma_; }
  double gamma(std::size_t n) const;
  /// Unnormalised log w̃ₙ(x); -inf for zero-weight components.
  const std::vector<double>& log_tilde_weights() const { return log_tilde_; }
  const Point& mean(std::size_t n) const { return means_.at(n); }
  const CovarianceFactor& covariance(std::size_t n) const { return *cache_->at(n).sigma; }

  /// log of the mixture density at y.
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// Inverse-CDF pick on exp(log γ − max log γ); ties go to the lowest index.
  std::size_t pick_component(double u) const;

  /// One draw; the chosen component is written to `component` when given.
  Point sample(CounterRng& rng, std::size_t* component = nullptr) const;

 private:
  Point x_;
  std::vector<double> log_tilde_;
  std::vector<double> log_gamma_;
  std::vector<Point> means_;
  std::shared_ptr<const std::vector<ComponentCache>> cache_;
};

ConditionalPlanMixture conditional_plan(const BenchmarkPair& pair,
                                        const Eigen::Ref<const Eigen::VectorXd>& x);

/// Draw i uses the stream (seed, i).
SampleMatrix sample_conditional(const ConditionalPlanMixture& plan, const Seed& seed,
                                std::size_t count);

struct SamplePair {
  Point x;
  Point y;
  std::size_t component = 0;
};

struct JointSamples {
  SampleMatrix x;
  SampleMatrix y;
  std::vector<std::size_t> component;

  std::size_t size() const { return component.size(); }
  SamplePair at(std::size_t i) const { return {x.row(i).transpose(), y.row(i).transpose(), component.at(i)}; }
};

/// One joint draw x ~ ℙ₀, y ~ π(·|x) from an existing stream.
SamplePair draw_joint(const BenchmarkPair& pair, CounterRng& rng);

/// Draw i is draw_joint() on the stream (seed, i).
JointSamples sample_joint(const BenchmarkPair& pair, const Seed& seed, std::size_t count);
SampleMatrix sample_source(const BenchmarkPair& pair, const Seed& seed, std::size_t count);
/// Second marginal of sample_joint (x discarded).
SampleMatrix sample_target(const BenchmarkPair& pair, const Seed& seed, std::size_t count);

struct Moments {
  Point mean;
  SymMatrix covariance;
};

Moments conditional_moments(const ConditionalPlanMixture& plan);

/// Rao-Blackwellised moments of ℙ₁: averages the analytic conditional
/// moments over `count` source draws (the same x draws as sample_joint).
Moments target_moments(const BenchmarkPair& pair, const Seed& seed, std::size_t count);

/// (f(y) − ½‖x − y‖²) / ε, the conditional log-density up to log Z_x.
double log_forward_density_unnormalized(const BenchmarkPair& pair,
                                        const Eigen::Ref<const Eigen::VectorXd>& x,
                                        const Eigen::Ref<const Eigen::VectorXd>& y);

struct ValueAndGradient {
  double value = 0.0;
  Point gradient;
};

/// log π(y|x) + log p₀(x) and its gradient in x: the unnormalised log-density
/// of the reverse conditional π(x|y).
ValueAndGradient log_reverse_density_unnormalized(const BenchmarkPair& pair,
                                                  const Eigen::Ref<const Eigen::VectorXd>& y,
                                                  const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace eotbench
