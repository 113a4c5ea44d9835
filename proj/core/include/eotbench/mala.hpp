#pragma once

#include "eotbench/plan.hpp"

#include <functional>
#include <variant>

namespace eotbench {

/// Start the chain from the x of a fresh draw (x, y) ~ π.
struct FromJointDraw {};

struct MalaConfig {
  double step_size = 1e-4;
  std::size_t steps = 200;
  std::size_t burn_in = 0;
  std::variant<Point, FromJointDraw> init = FromJointDraw{};
};

/// Per-ε default step: 1e-3, 1e-4, 1e-5 at ε = 10, 1, 0.1, i.e. 1e-4·ε.
double default_mala_step_size(double epsilon);
MalaConfig default_mala_config(double epsilon);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  double final_log_density = 0.0;
  std::size_t steps_taken = 0;
};

struct ChainResult {
  /// States after each step past burn-in (rejections repeat the state).
  SampleMatrix samples;
  ChainDiagnostics diagnostics;

  Point final_state() const { return samples.row(samples.rows() - 1).transpose(); }
};

/// Log-density with its gradient written to `grad`.
using LogDensityWithGrad = std::function<double(const Point& x, Point& grad)>;

/// Metropolis-adjusted Langevin: proposal x' = x + η ∇log p(x) + √(2η) ξ,
/// accepted with the ratio that includes both proposal densities.
ChainResult mala_chain(const LogDensityWithGrad& log_target, const Point& start, double step_size,
                       std::size_t steps, const Seed& seed, std::size_t burn_in = 0);

/// Chain on π(x|y) ∝ π(y|x) p₀(x). FromJointDraw starts at a source draw,
/// since no x is paired with an arbitrary caller-supplied y.
ChainResult sample_reverse_conditional(const BenchmarkPair& pair,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const MalaConfig& cfg, const Seed& seed);

/// `chains_per_y` independent chains for each row of `ys`, emitted grouped by
/// y. With `final_only` each chain contributes its last state, otherwise all
/// post-burn-in states.
SampleMatrix sample_reverse_batch(const BenchmarkPair& pair, const SampleMatrix& ys,
                                  std::size_t chains_per_y, const MalaConfig& cfg,
                                  const Seed& seed, bool final_only,
                                  std::vector<ChainDiagnostics>* diagnostics = nullptr);

struct PairedReverseSamples {
  SampleMatrix y;
  SampleMatrix x;  // final chain state per y
  std::vector<ChainDiagnostics> diagnostics;
};

/// Draws (x, y) ~ π and runs a chain on π(·|y) started at its paired x.
PairedReverseSamples sample_reverse_paired(const BenchmarkPair& pair, const Seed& seed,
                                           std::size_t count, const MalaConfig& cfg);

}  // namespace eotbench
