#include "eotbench/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eotbench {

double log_sum_exp(const std::vector<double>& values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double v : values) {
    if (v != -std::numeric_limits<double>::infinity()) total += std::exp(v - peak);
  }
  return peak + std::log(total);
}

LsePotential::LsePotential(double epsilon, std::vector<LseComponent> components)
    : epsilon_(epsilon), dim_(0), components_(std::move(components)) {
  require(std::isfinite(epsilon_) && epsilon_ > 0.0, ErrorCode::kInvalidArgument,
          "epsilon must be positive and finite");
  require(!components_.empty(), ErrorCode::kInvalidArgument, "potential needs a component");
  dim_ = components_.front().center.size();
  require(dim_ >= 1, ErrorCode::kInvalidArgument, "potential dimension must be positive");
  for (std::size_t n = 0; n < components_.size(); ++n) {
    const auto& c = components_[n];
    const std::string where = "component " + std::to_string(n);
    require_dim(c.center.size(), dim_, where + " center");
    require_dim(c.matrix.dim(), dim_, where + " matrix");
    require(c.center.allFinite(), ErrorCode::kNonFinite, where + " center is not finite");
    require(!std::isnan(c.log_weight) && c.log_weight != std::numeric_limits<double>::infinity(),
            ErrorCode::kInvalidArgument, where + " weight is not finite");
  }
}

LsePotential LsePotential::from_weights(double epsilon, const std::vector<double>& weights,
                                        const std::vector<Point>& centers,
                                        const std::vector<SymMatrix>& matrices) {
  require(weights.size() == centers.size() && centers.size() == matrices.size(),
          ErrorCode::kDimensionMismatch, "weights, centers and matrices differ in length");
  std::vector<LseComponent> components;
  components.reserve(weights.size());
  for (std::size_t n = 0; n < weights.size(); ++n) {
    require(std::isfinite(weights[n]) && weights[n] >= 0.0, ErrorCode::kInvalidArgument,
            "weight " + std::to_string(n) + " must be finite and non-negative");
    components.push_back({std::log(weights[n]), centers[n], matrices[n]});
  }
  return LsePotential(epsilon, std::move(components));
}

std::vector<double> LsePotential::weights() const {
  std::vector<double> w;
  w.reserve(components_.size());
  for (const auto& c : components_) w.push_back(std::exp(c.log_weight));
  return w;
}

ValidationReport validate_potential(const LsePotential& potential) {
  ValidationReport report;
  bool any_positive = false;
  bool eigen_ok = true;
  for (std::size_t n = 0; n < potential.size(); ++n) {
    const auto& c = potential.component(n);
    const double lo = c.matrix.min_eigenvalue();
    report.min_eigenvalues.push_back(lo);
    if (!(lo > -1.0 + kAppropriateMargin)) {
      eigen_ok = false;
      if (report.reason.empty()) {
        report.reason = "component " + std::to_string(n) + " has eigenvalue " +
                        std::to_string(lo) + " outside (-1, inf)";
      }
    }
    if (c.log_weight > -std::numeric_limits<double>::infinity()) any_positive = true;
  }
  if (!any_positive && report.reason.empty()) report.reason = "all weights are zero";
  report.appropriate = eigen_ok && any_positive;
  return report;
}

void require_appropriate(const LsePotential& potential) {
  const auto report = validate_potential(potential);
  if (!report.appropriate) throw Error(ErrorCode::kNotAppropriate, report.reason);
}

double log_quad_form(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const SymMatrix& a) {
  require_dim(y.size(), a.dim(), "log_quad_form point");
  require_dim(b.size(), a.dim(), "log_quad_form center");
  return -0.5 * a.quad_form(y - b);
}

double potential_value(const LsePotential& potential, const Eigen::Ref<const Eigen::VectorXd>& y) {
  require_dim(y.size(), potential.dim(), "potential argument");
  const double eps = potential.epsilon();
  std::vector<double> terms;
  terms.reserve(potential.size());
  for (const auto& c : potential.components()) {
    if (c.log_weight == -std::numeric_limits<double>::infinity()) continue;
    terms.push_back(c.log_weight + log_quad_form(y, c.center, c.matrix) / eps);
  }
  require(!terms.empty(), ErrorCode::kDegenerate, "all potential weights are zero");
  return eps * log_sum_exp(terms);
}

double schrodinger_potential_log(const LsePotential& potential,
                                 const Eigen::Ref<const Eigen::VectorXd>& y) {
  return potential_value(potential, y) / potential.epsilon();
}

}  // namespace eotbench
