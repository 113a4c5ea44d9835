#pragma once

#include "eotbench/gaussian.hpp"

#include <memory>
#include <vector>

namespace eotbench {

struct GaussianComponent {
  double weight = 1.0;
  Point mean;
  SymMatrix covariance;
};

/// Source law ℙ₀: a Gaussian or a finite Gaussian mixture. Both have an
/// analytic log-density and score, which the reverse sampler relies on.
class SourceDistribution {
 public:
  static SourceDistribution gaussian(Point mean, SymMatrix covariance);
  /// Weights must be positive and sum to one within 1e-12.
  static SourceDistribution mixture(std::vector<GaussianComponent> components);

  bool is_gaussian() const { return gaussian_; }
  Index dim() const { return dim_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Log-density with its gradient (the score) written to `grad`.
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& x, Point& grad) const;

  Point sample(CounterRng& rng) const;

  Point mean() const;
  SymMatrix covariance() const;

 private:
  SourceDistribution() = default;

  bool gaussian_ = true;
  Index dim_ = 0;
  std::vector<GaussianComponent> components_;
  std::vector<double> log_weights_;
  std::vector<std::shared_ptr<const CovarianceFactor>> factors_;
};

}  // namespace eotbench
