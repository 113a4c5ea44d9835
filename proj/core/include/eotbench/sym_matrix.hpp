#pragma once

#include "eotbench/types.hpp"

#include <functional>

namespace eotbench {

/// Symmetric real matrix with a compact `value * I` form.
///
/// Every preset in the benchmark uses isotropic matrices, so the scalar form
/// keeps per-component work O(D). The dense form is kept for general
/// potentials; user-supplied dense matrices must already be symmetric
/// (asymmetry is an error, never silently repaired).
class SymMatrix {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  /// Empty 0×0 matrix; only useful as a placeholder before assignment.
  SymMatrix() = default;

  static SymMatrix scalar_identity(Index dim, double value);

  /// Validates finiteness and symmetry of user-provided entries.
  static SymMatrix dense(Eigen::MatrixXd entries);

  /// For matrices produced by arithmetic (sample covariances, spectral
  /// maps); averages with the transpose instead of rejecting round-off.
  static SymMatrix symmetrized(const Eigen::MatrixXd& entries);

  Index dim() const { return dim_; }
  bool is_scalar() const { return scalar_; }
  double scalar_value() const;

  Eigen::MatrixXd to_dense() const;
  Point apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// vᵀ M v
  double quad_form(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  double trace() const;
  double min_eigenvalue() const;

  /// Max absolute entry of M − Mᵀ relative to the largest entry.
  static double symmetry_residual(const Eigen::MatrixXd& m);

  bool operator==(const SymMatrix& other) const;

 private:
  SymMatrix(Index dim, double value);
  explicit SymMatrix(Eigen::MatrixXd entries);

  Index dim_ = 0;
  bool scalar_ = true;
  double value_ = 0.0;
  Eigen::MatrixXd entries_;
};

/// Eigen-decomposition of a SymMatrix; `vectors` is empty for the scalar form.
struct Spectrum {
  Index dim = 0;
  bool scalar = true;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  static Spectrum of(const SymMatrix& m);

  double min_value() const { return values.minCoeff(); }
  double max_value() const { return values.maxCoeff(); }

  /// Q g(Λ) Qᵀ, preserving the scalar form.
  SymMatrix map(const std::function<double(double)>& g) const;

  /// Σᵢ g(λᵢ), counting multiplicity D for the scalar form.
  double sum(const std::function<double(double)>& g) const;
};

}  // namespace eotbench
