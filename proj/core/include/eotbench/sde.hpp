#pragma once

#include "eotbench/drift.hpp"
#include "eotbench/plan.hpp"

#include <functional>
#include <optional>

namespace eotbench {

/// One sample path on a time grid in [0, 1].
struct Trajectory {
  std::vector<double> times;
  SampleMatrix states;  // one row per grid time
  double epsilon = 1.0;
  /// Grid index at which a non-finite state appeared; later rows are NaN.
  std::optional<std::size_t> failed_at;

  bool ok() const { return !failed_at.has_value(); }
};

/// Uniform grid k/steps, k = 0..steps.
std::vector<double> uniform_grid(std::size_t steps);

/// Called once per grid node of each path, in time order within a path.
/// Paths of one reduction block (kReductionBlock consecutive indices) are
/// visited sequentially in index order; different blocks run concurrently.
using PathVisitor =
    std::function<void(std::size_t path, std::size_t step, double t, const Point& state)>;

struct SimulationSummary {
  std::size_t paths = 0;
  std::size_t failed = 0;
  std::vector<std::size_t> failed_paths;
};

/// Euler–Maruyama for dX = v(X, t) dt + √ε dW on the grid t_k = k/steps:
///   X_{k+1} = X_k + v(X_k, t_k) Δt + √(ε Δt) ξ_k.
/// The drift is never evaluated at t = 1. Path p draws noise from (seed, p).
/// A path whose state turns non-finite is reported and stops being advanced.
SimulationSummary simulate_paths(const DriftField& drift, const SampleMatrix& source_draws,
                                 double epsilon, std::size_t steps, const Seed& seed,
                                 const PathVisitor& visit);

/// Full trajectories (memory grows as paths × (steps + 1) × D).
std::vector<Trajectory> simulate_sb(const DriftField& drift, const SampleMatrix& source_draws,
                                    double epsilon, std::size_t steps, const Seed& seed);

/// Terminal states only; rows of failed paths are NaN.
SampleMatrix simulate_endpoints(const DriftField& drift, const SampleMatrix& source_draws,
                                double epsilon, std::size_t steps, const Seed& seed,
                                SimulationSummary* summary = nullptr);

/// Brownian bridge of W^ε pinned at x (t=0) and y (t=1):
/// N(x + t(y − x), ε t(1 − t) I).
Point brownian_bridge_sample(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double t, double epsilon,
                             CounterRng& rng);
Point brownian_bridge_sample(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double t, double epsilon,
                             const Seed& seed);

/// Exact SB path: (x, y) is draw `index` of sample_joint(pair, seed, ·), the
/// interior follows the Brownian bridge sequentially along `grid` (which must
/// start at 0, end at 1 and increase strictly).
Trajectory sample_sb_trajectory_exact(const BenchmarkPair& pair, const Seed& seed,
                                      const std::vector<double>& grid, std::size_t index = 0);

std::vector<Trajectory> sample_sb_trajectories_exact(const BenchmarkPair& pair, const Seed& seed,
                                                     const std::vector<double>& grid,
                                                     std::size_t count);

}  // namespace eotbench
