#pragma once

#include "eotbench/rng.hpp"
#include "eotbench/sym_matrix.hpp"

namespace eotbench {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112;

/// Positive-definite covariance with a cached factor L (L Lᵀ = Σ).
class CovarianceFactor {
 public:
  explicit CovarianceFactor(SymMatrix covariance);

  const SymMatrix& covariance() const { return covariance_; }
  Index dim() const { return covariance_.dim(); }
  double log_det() const { return log_det_; }
  /// Dense lower-triangular Cholesky factor (D×D even for the scalar form).
  Eigen::MatrixXd cholesky() const;

  /// dᵀ Σ⁻¹ d
  double mahalanobis_sq(const Eigen::Ref<const Eigen::VectorXd>& d) const;
  Point solve(const Eigen::Ref<const Eigen::VectorXd>& d) const;
  /// L z, mapping standard normals to N(0, Σ).
  Point transform(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  /// log N(y | mean, Σ)
  double log_density(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& mean) const;

 private:
  SymMatrix covariance_;
  double scalar_sqrt_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double log_det_ = 0.0;
};

}  // namespace eotbench
