#pragma once

#include "eotbench/pair.hpp"

#include <functional>
#include <memory>
#include <variant>

namespace eotbench {

/// Closed-form optimal Schrödinger-bridge drift for an LSE potential:
///
///   v(x,t) = ε Σₙ softmaxₙ(log wₙ + ½ log det Σₙᵗ − ½ (x−bₙ)ᵀ Bₙᵗ (x−bₙ)) · (−Bₙᵗ (x−bₙ))
///
/// with Aₙᵗ = (1−t)Aₙ, Σₙᵗ = ε(Aₙᵗ + I)⁻¹ and Bₙᵗ = (1/ε) Aₙ (Aₙᵗ + I)⁻¹. The
/// last form equals (εI − Σₙᵗ)/(ε²(1−t)) but has no 0/0 as t → 1.
/// Requires 0 ≤ t < 1.
Point optimal_drift(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                    double t);

/// A drift v(x, t) on [0, 1): the optimal one, an arbitrary callable, or a
/// constant offset of another field.
class DriftField {
 public:
  using Function = std::function<Point(const Point&, double)>;

  struct Optimal {
    BenchmarkPair pair;
  };
  struct Custom {
    Function function;
    Index dim;
  };
  struct Perturbed {
    std::shared_ptr<const DriftField> base;
    Point offset;
  };

  static DriftField optimal(BenchmarkPair pair);
  static DriftField custom(Function function, Index dim);
  static DriftField zero(Index dim);
  static DriftField perturbed(DriftField base, Point offset);

  Point operator()(const Eigen::Ref<const Eigen::VectorXd>& x, double t) const;
  Index dim() const;

  bool is_optimal() const { return std::holds_alternative<Optimal>(variant_); }
  const std::variant<Optimal, Custom, Perturbed>& variant() const { return variant_; }

 private:
  explicit DriftField(std::variant<Optimal, Custom, Perturbed> v) : variant_(std::move(v)) {}

  std::variant<Optimal, Custom, Perturbed> variant_;
};

}  // namespace eotbench
