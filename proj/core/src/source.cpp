#include "eotbench/source.hpp"

#include "eotbench/potential.hpp"

#include <cmath>

namespace eotbench {

SourceDistribution SourceDistribution::gaussian(Point mean, SymMatrix covariance) {
  std::vector<GaussianComponent> one;
  one.push_back({1.0, std::move(mean), std::move(covariance)});
  auto s = mixture(std::move(one));
  s.gaussian_ = true;
  return s;
}

SourceDistribution SourceDistribution::mixture(std::vector<GaussianComponent> components) {
  require(!components.empty(), ErrorCode::kInvalidArgument, "source needs a component");
  SourceDistribution s;
  s.gaussian_ = components.size() == 1;
  s.dim_ = components.front().mean.size();
  double total = 0.0;
  for (std::size_t k = 0; k < components.size(); ++k) {
    const auto& c = components[k];
    require_dim(c.mean.size(), s.dim_, "source component mean");
    require_dim(c.covariance.dim(), s.dim_, "source component covariance");
    require(c.mean.allFinite(), ErrorCode::kNonFinite, "source mean is not finite");
    require(std::isfinite(c.weight) && c.weight > 0.0, ErrorCode::kInvalidArgument,
            "source mixture weights must be positive");
    total += c.weight;
    s.log_weights_.push_back(std::log(c.weight));
    s.factors_.push_back(std::make_shared<const CovarianceFactor>(c.covariance));
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::kInvalidArgument,
          "source mixture weights must sum to one");
  s.components_ = std::move(components);
  return s;
}

double SourceDistribution::log_density(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  require_dim(x.size(), dim_, "source density argument");
  std::vector<double> terms(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    terms[k] = log_weights_[k] + factors_[k]->log_density(x, components_[k].mean);
  }
  return log_sum_exp(terms);
}

double SourceDistribution::log_density(const Eigen::Ref<const Eigen::VectorXd>& x,
                                       Point& grad) const {
  require_dim(x.size(), dim_, "source density argument");
  const std::size_t n = components_.size();
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    terms[k] = log_weights_[k] + factors_[k]->log_density(x, components_[k].mean);
  }
  const double total = log_sum_exp(terms);
  grad = Point::Zero(dim_);
  for (std::size_t k = 0; k < n; ++k) {
    const double r = std::exp(terms[k] - total);
    if (r == 0.0) continue;
    grad -= r * factors_[k]->solve(x - components_[k].mean);
  }
  return total;
}

Point SourceDistribution::sample(CounterRng& rng) const {
  std::size_t k = 0;
  if (components_.size() > 1) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    k = components_.size() - 1;
    for (std::size_t j = 0; j < components_.size(); ++j) {
      cumulative += components_[j].weight;
      if (u < cumulative) {
        k = j;
        break;
      }
    }
  }
  return components_[k].mean + factors_[k]->transform(rng.normal_vector(dim_));
}

Point SourceDistribution::mean() const {
  Point m = Point::Zero(dim_);
  for (const auto& c : components_) m += c.weight * c.mean;
  return m;
}

SymMatrix SourceDistribution::covariance() const {
  if (gaussian_) return components_.front().covariance;
  const Point m = mean();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& c : components_) {
    const Point d = c.mean - m;
    cov += c.weight * (c.covariance.to_dense() + d * d.transpose());
  }
  return SymMatrix::symmetrized(cov);
}

}  // namespace eotbench
