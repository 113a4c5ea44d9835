#pragma once

#include "eotbench/pair.hpp"

namespace eotbench {

/// Brute-force quadrature references for dimension 1 and 2. They integrate
/// the defining formulas directly and never call the closed-form plan or
/// drift, so they can adjudicate both.
///
/// Integration uses fixed 31-point Gauss–Kronrod panels laid over the region
/// where the integrand carries mass. Panel placement depends only on the
/// query point, which keeps the nodes identical across the two finite
/// difference evaluations of the drift oracle. Throws kQuadrature when the
/// embedded Gauss/Kronrod error estimate exceeds the requested tolerance.

/// log Z_x with Z_x = ∫ exp((f(y) − ½‖x − y‖²)/ε) dy.
double log_z_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                               double rel_tol = 1e-8);
double z_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                           double rel_tol = 1e-8);

/// ε ∇ₓ log ∫ N(y | x, (1 − t) ε I) exp(f(y)/ε) dy by central differences
/// with h = 1e-5 (1 + ‖x‖).
Point drift_quadrature_oracle(const BenchmarkPair& pair, const Eigen::Ref<const Eigen::VectorXd>& x,
                              double t, double rel_tol = 1e-9);

struct ScalarMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the reverse conditional x | y in dimension 1, by
/// integrating exp(log source(x) + log π(y | x)) over x.
ScalarMoments reverse_moments_quadrature_oracle(const BenchmarkPair& pair, double y,
                                                double rel_tol = 1e-8);

}  // namespace eotbench
