#include "eotbench/gaussian.hpp"

#include <cmath>

namespace eotbench {

CovarianceFactor::CovarianceFactor(SymMatrix covariance) : covariance_(std::move(covariance)) {
  const auto d = static_cast<double>(covariance_.dim());
  if (covariance_.is_scalar()) {
    const double v = covariance_.scalar_value();
    require(v > 0.0, ErrorCode::kDegenerate, "covariance is not positive definite");
    scalar_sqrt_ = std::sqrt(v);
    log_det_ = d * std::log(v);
    return;
  }
  llt_.compute(covariance_.to_dense());
  require(llt_.info() == Eigen::Success, ErrorCode::kDegenerate,
          "covariance is not positive definite");
  const Eigen::MatrixXd l = llt_.matrixL();
  log_det_ = 2.0 * l.diagonal().array().log().sum();
}

Eigen::MatrixXd CovarianceFactor::cholesky() const {
  if (covariance_.is_scalar()) {
    return scalar_sqrt_ * Eigen::MatrixXd::Identity(dim(), dim());
  }
  return llt_.matrixL();
}

double CovarianceFactor::mahalanobis_sq(const Eigen::Ref<const Eigen::VectorXd>& d) const {
  require_dim(d.size(), dim(), "mahalanobis distance");
  if (covariance_.is_scalar()) return d.squaredNorm() / covariance_.scalar_value();
  return llt_.matrixL().solve(d).squaredNorm();
}

Point CovarianceFactor::solve(const Eigen::Ref<const Eigen::VectorXd>& d) const {
  require_dim(d.size(), dim(), "covariance solve");
  if (covariance_.is_scalar()) return d / covariance_.scalar_value();
  return llt_.solve(d);
}

Point CovarianceFactor::transform(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  require_dim(z.size(), dim(), "covariance transform");
  if (covariance_.is_scalar()) return scalar_sqrt_ * z;
  return llt_.matrixL() * z;
}

double CovarianceFactor::log_density(const Eigen::Ref<const Eigen::VectorXd>& y,
                                     const Eigen::Ref<const Eigen::VectorXd>& mean) const {
  const double d = static_cast<double>(dim());
  return -0.5 * (mahalanobis_sq(y - mean) + log_det_ + d * kLog2Pi);
}

}  // namespace eotbench
