#include "eotbench/sde.hpp"

#include "eotbench/parallel.hpp"

#include <cmath>
#include <limits>

namespace eotbench {

std::vector<double> uniform_grid(std::size_t steps) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "grid needs at least one step");
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    grid[k] = static_cast<double>(k) / static_cast<double>(steps);
  }
  return grid;
}

SimulationSummary simulate_paths(const DriftField& drift, const SampleMatrix& source_draws,
                                 double epsilon, std::size_t steps, const Seed& seed,
                                 const PathVisitor& visit) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "simulation needs at least one step");
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "volatility epsilon must be positive");
  require_dim(source_draws.cols(), drift.dim(), "source draws vs drift");
  const std::size_t paths = static_cast<std::size_t>(source_draws.rows());
  const double dt = 1.0 / static_cast<double>(steps);
  const double noise_scale = std::sqrt(epsilon * dt);
  std::vector<std::size_t> failed_step(paths, std::numeric_limits<std::size_t>::max());

  parallel_blocks(paths, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      CounterRng rng(seed, p);
      Point state = source_draws.row(static_cast<Index>(p)).transpose();
      visit(p, 0, 0.0, state);
      for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        const Point v = drift(state, t);
        state += v * dt + noise_scale * rng.normal_vector(state.size());
        if (!state.allFinite()) {
          failed_step[p] = k + 1;
          break;
        }
        visit(p, k + 1, static_cast<double>(k + 1) * dt, state);
      }
    }
  });

  SimulationSummary summary;
  summary.paths = paths;
  for (std::size_t p = 0; p < paths; ++p) {
    if (failed_step[p] != std::numeric_limits<std::size_t>::max()) {
      ++summary.failed;
      summary.failed_paths.push_back(p);
    }
  }
  return summary;
}

std::vector<Trajectory> simulate_sb(const DriftField& drift, const SampleMatrix& source_draws,
                                    double epsilon, std::size_t steps, const Seed& seed) {
  const auto grid = uniform_grid(steps);
  const std::size_t paths = static_cast<std::size_t>(source_draws.rows());
  std::vector<Trajectory> out(paths);
  for (auto& traj : out) {
    traj.times = grid;
    traj.epsilon = epsilon;
    traj.states = SampleMatrix::Constant(static_cast<Index>(steps + 1), drift.dim(),
                                         std::numeric_limits<double>::quiet_NaN());
  }
  const auto summary = simulate_paths(
      drift, source_draws, epsilon, steps, seed,
      [&](std::size_t p, std::size_t k, double, const Point& state) {
        out[p].states.row(static_cast<Index>(k)) = state.transpose();
      });
  for (std::size_t p : summary.failed_paths) {
    auto& traj = out[p];
    for (Index k = 0; k < traj.states.rows(); ++k) {
      if (!traj.states.row(k).allFinite()) {
        traj.failed_at = static_cast<std::size_t>(k);
        break;
      }
    }
  }
  return out;
}

SampleMatrix simulate_endpoints(const DriftField& drift, const SampleMatrix& source_draws,
                                double epsilon, std::size_t steps, const Seed& seed,
                                SimulationSummary* summary) {
  SampleMatrix out = SampleMatrix::Constant(source_draws.rows(), drift.dim(),
                                            std::numeric_limits<double>::quiet_NaN());
  auto result = simulate_paths(drift, source_draws, epsilon, steps, seed,
                               [&](std::size_t p, std::size_t k, double, const Point& state) {
                                 if (k == steps) out.row(static_cast<Index>(p)) = state.transpose();
                               });
  if (summary != nullptr) *summary = std::move(result);
  return out;
}

Point brownian_bridge_sample(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double t, double epsilon,
                             CounterRng& rng) {
  require_dim(y.size(), x.size(), "bridge endpoints");
  require(t >= 0.0 && t <= 1.0, ErrorCode::kInvalidArgument, "bridge time must lie in [0, 1]");
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "bridge epsilon must be positive");
  if (t == 0.0) return x;
  if (t == 1.0) return y;
  const double sd = std::sqrt(epsilon * t * (1.0 - t));
  return x + t * (y - x) + sd * rng.normal_vector(x.size());
}

Point brownian_bridge_sample(const Eigen::Ref<const Eigen::VectorXd>& x,
                             const Eigen::Ref<const Eigen::VectorXd>& y, double t, double epsilon,
                             const Seed& seed) {
  CounterRng rng(seed, 0);
  return brownian_bridge_sample(x, y, t, epsilon, rng);
}

Trajectory sample_sb_trajectory_exact(const BenchmarkPair& pair, const Seed& seed,
                                      const std::vector<double>& grid, std::size_t index) {
  require(grid.size() >= 2 && grid.front() == 0.0 && grid.back() == 1.0,
          ErrorCode::kInvalidArgument, "grid must start at 0 and end at 1");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    require(grid[k] > grid[k - 1], ErrorCode::kInvalidArgument, "grid must increase strictly");
  }
  CounterRng endpoint_rng(seed, index);
  const SamplePair ends = draw_joint(pair, endpoint_rng);

  Trajectory traj;
  traj.times = grid;
  traj.epsilon = pair.epsilon();
  traj.states.resize(static_cast<Index>(grid.size()), pair.dim());
  traj.states.row(0) = ends.x.transpose();
  traj.states.row(static_cast<Index>(grid.size() - 1)) = ends.y.transpose();

  // X_u | X_s = a, X_1 = y  ~  N(a + (u−s)/(1−s) (y − a), ε (u−s)(1−u)/(1−s) I)
  CounterRng bridge_rng(seed.substream(1), index);
  Point current = ends.x;
  for (std::size_t k = 1; k + 1 < grid.size(); ++k) {
    const double s = grid[k - 1];
    const double u = grid[k];
    const double frac = (u - s) / (1.0 - s);
    const double var = pair.epsilon() * (u - s) * (1.0 - u) / (1.0 - s);
    current = current + frac * (ends.y - current) +
              std::sqrt(var) * bridge_rng.normal_vector(pair.dim());
    traj.states.row(static_cast<Index>(k)) = current.transpose();
  }
  return traj;
}

std::vector<Trajectory> sample_sb_trajectories_exact(const BenchmarkPair& pair, const Seed& seed,
                                                     const std::vector<double>& grid,
                                                     std::size_t count) {
  std::vector<Trajectory> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = sample_sb_trajectory_exact(pair, seed, grid, i); });
  return out;
}

}  // namespace eotbench
