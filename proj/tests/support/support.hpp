#pragma once

#include "eotbench/pair.hpp"
#include "eotbench/rng.hpp"

#include <cmath>

namespace eotbench::testing {

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
inline Eigen::MatrixXd random_rotation(Index dim, CounterRng& rng) {
  Eigen::MatrixXd g(dim, dim);
  for (Index i = 0; i < dim; ++i) g.row(i) = rng.normal_vector(dim).transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix column signs so the distribution is Haar.
  const Eigen::VectorXd diag = Eigen::MatrixXd(qr.matrixQR()).diagonal();
  for (Index j = 0; j < dim; ++j) {
    if (diag[j] < 0) q.col(j) *= -1.0;
  }
  return q;
}

/// Symmetric matrix with eigenvalues uniform in (lo, hi).
inline SymMatrix random_symmetric(Index dim, double lo, double hi, CounterRng& rng) {
  const Eigen::MatrixXd q = random_rotation(dim, rng);
  Eigen::VectorXd eig(dim);
  for (Index i = 0; i < dim; ++i) eig[i] = lo + (hi - lo) * rng.uniform();
  return SymMatrix::symmetrized(q * eig.asDiagonal() * q.transpose());
}

struct RandomPairOptions {
  double eig_lo = -0.5;
  double eig_hi = 2.0;
  double center_scale = 1.5;
  bool dense = true;
};

/// Appropriate potential with dense (or scalar) matrices and a Gaussian source
/// with a random covariance.
inline BenchmarkPair random_pair(Index dim, std::size_t n, double eps, std::uint64_t seed,
                                 const RandomPairOptions& o = {}) {
  CounterRng rng(Seed{seed, 99}, 0);
  std::vector<double> weights;
  std::vector<Point> centers;
  std::vector<SymMatrix> matrices;
  for (std::size_t k = 0; k < n; ++k) {
    weights.push_back(0.2 + 0.8 * rng.uniform());
    centers.push_back(o.center_scale * rng.normal_vector(dim));
    if (o.dense) {
      matrices.push_back(random_symmetric(dim, o.eig_lo, o.eig_hi, rng));
    } else {
      matrices.push_back(SymMatrix::scalar_identity(dim, o.eig_lo + (o.eig_hi - o.eig_lo) * rng.uniform()));
    }
  }
  auto source = SourceDistribution::gaussian(0.3 * rng.normal_vector(dim),
                                             random_symmetric(dim, 0.3, 1.2, rng));
  return BenchmarkPair(std::move(source), LsePotential::from_weights(eps, weights, centers, matrices));
}

/// Single-component pair with A = a·I, b = center, N(mean, s I) source.
inline BenchmarkPair single_pair(Index dim, double a, double eps, double center = 0.0,
                                 double source_var = 1.0) {
  return BenchmarkPair(
      SourceDistribution::gaussian(Point::Zero(dim), SymMatrix::scalar_identity(dim, source_var)),
      LsePotential::from_weights(eps, {1.0}, {Point::Constant(dim, center)},
                                 {SymMatrix::scalar_identity(dim, a)}));
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace eotbench::testing
