#pragma once

#include "eotbench/sym_matrix.hpp"

#include <vector>

namespace eotbench {

/// One term wₙ·Q(y | bₙ, Aₙ/ε) of the log-sum-exp potential. The weight is
/// held as log wₙ; a zero weight is stored as -inf and skipped everywhere.
struct LseComponent {
  double log_weight = 0.0;
  Point center;
  SymMatrix matrix;
};

/// Weighted log-sum-exp of quadratics:
///   f(y) = ε log Σₙ wₙ exp(-½ (y - bₙ)ᵀ (Aₙ/ε) (y - bₙ)).
///
/// Construction checks structure only (dimensions, finiteness, ε > 0,
/// non-negative weights). Whether the potential is usable for the benchmark
/// is decided by validate_potential().
class LsePotential {
 public:
  LsePotential(double epsilon, std::vector<LseComponent> components);

  /// Convenience constructor from linear-scale weights (wₙ ≥ 0).
  static LsePotential from_weights(double epsilon, const std::vector<double>& weights,
                                   const std::vector<Point>& centers,
                                   const std::vector<SymMatrix>& matrices);

  double epsilon() const { return epsilon_; }
  Index dim() const { return dim_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<LseComponent>& components() const { return components_; }
  const LseComponent& component(std::size_t n) const { return components_.at(n); }
  std::vector<double> weights() const;

 private:
  double epsilon_;
  Index dim_;
  std::vector<LseComponent> components_;
};

struct ValidationReport {
  std::vector<double> min_eigenvalues;
  bool appropriate = false;
  std::string reason;
};

/// Eigenvalues must exceed −1 + this margin; Σₙ = ε(Aₙ + I)⁻¹ diverges at −1.
inline constexpr double kAppropriateMargin = 1e-9;

ValidationReport validate_potential(const LsePotential& potential);

/// Throws kNotAppropriate with the report's reason when validation fails.
void require_appropriate(const LsePotential& potential);

/// log Q(y | b, A) = -½ (y - b)ᵀ A (y - b).
double log_quad_form(const Eigen::Ref<const Eigen::VectorXd>& y,
                     const Eigen::Ref<const Eigen::VectorXd>& b, const SymMatrix& a);

/// f(y), evaluated as a max-shifted log-sum-exp.
double potential_value(const LsePotential& potential, const Eigen::Ref<const Eigen::VectorXd>& y);

/// log φ(y) = f(y) / ε, the log of the Schrödinger potential.
double schrodinger_potential_log(const LsePotential& potential,
                                 const Eigen::Ref<const Eigen::VectorXd>& y);

/// Max-shifted log Σ exp(vᵢ); -inf entries are ignored, all -inf gives -inf.
double log_sum_exp(const std::vector<double>& values);

}  // namespace eotbench
