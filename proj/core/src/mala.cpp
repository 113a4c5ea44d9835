#include "eotbench/mala.hpp"

#include "eotbench/parallel.hpp"

#include <cmath>

namespace eotbench {

double default_mala_step_size(double epsilon) {
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "epsilon must be positive");
  return 1e-4 * epsilon;
}

MalaConfig default_mala_config(double epsilon) {
  MalaConfig cfg;
  cfg.step_size = default_mala_step_size(epsilon);
  cfg.steps = 200;
  return cfg;
}

ChainResult mala_chain(const LogDensityWithGrad& log_target, const Point& start, double step_size,
                       std::size_t steps, const Seed& seed, std::size_t burn_in) {
  require(step_size > 0.0, ErrorCode::kInvalidArgument, "MALA step size must be positive");
  require(steps >= 1, ErrorCode::kInvalidArgument, "MALA needs at least one step");
  require(burn_in < steps, ErrorCode::kInvalidArgument, "burn-in must be shorter than the chain");

  CounterRng rng(seed, 0);
  const Index d = start.size();
  const double noise = std::sqrt(2.0 * step_size);
  // log q(to | from) up to a constant shared by both directions.
  auto log_proposal = [&](const Point& to, const Point& from, const Point& grad_from) {
    return -(to - from - step_size * grad_from).squaredNorm() / (4.0 * step_size);
  };

  Point x = start;
  Point grad_x;
  double log_px = log_target(x, grad_x);
  require(std::isfinite(log_px) && grad_x.allFinite(), ErrorCode::kNonFinite,
          "MALA target or gradient is not finite at the start point");

  ChainResult result;
  result.samples.resize(static_cast<Index>(steps - burn_in), d);
  std::size_t accepted = 0;
  Point grad_prop;
  for (std::size_t k = 0; k < steps; ++k) {
    const Point proposal = x + step_size * grad_x + noise * rng.normal_vector(d);
    const double log_pp = log_target(proposal, grad_prop);
    if (!grad_prop.allFinite() && std::isfinite(log_pp)) {
      throw Error(ErrorCode::kNonFinite,
                  "MALA gradient is not finite at step " + std::to_string(k));
    }
    const double u = rng.uniform();
    if (std::isfinite(log_pp)) {
      const double log_ratio = log_pp + log_proposal(x, proposal, grad_prop) - log_px -
                               log_proposal(proposal, x, grad_x);
      if (std::log(u) < log_ratio) {
        x = proposal;
        grad_x = grad_prop;
        log_px = log_pp;
        ++accepted;
      }
    }
    if (k >= burn_in) result.samples.row(static_cast<Index>(k - burn_in)) = x.transpose();
  }
  result.diagnostics.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(steps);
  result.diagnostics.final_log_density = log_px;
  result.diagnostics.steps_taken = steps;
  return result;
}

namespace {

LogDensityWithGrad reverse_target(const BenchmarkPair& pair, const Point& y) {
  return [&pair, y](const Point& x, Point& grad) {
    auto vg = log_reverse_density_unnormalized(pair, y, x);
    grad = std::move(vg.gradient);
    return vg.value;
  };
}

}  // namespace

ChainResult sample_reverse_conditional(const BenchmarkPair& pair,
                                       const Eigen::Ref<const Eigen::VectorXd>& y,
                                       const MalaConfig& cfg, const Seed& seed) {
  require_dim(y.size(), pair.dim(), "reverse sampler y");
  Point start;
  if (const auto* explicit_start = std::get_if<Point>(&cfg.init)) {
    require_dim(explicit_start->size(), pair.dim(), "reverse sampler start");
    start = *explicit_start;
  } else {
    CounterRng init_rng(seed.substream(1), 0);
    start = pair.source().sample(init_rng);
  }
  return mala_chain(reverse_target(pair, Point(y)), start, cfg.step_size, cfg.steps,
                    seed.substream(2), cfg.burn_in);
}

SampleMatrix sample_reverse_batch(const BenchmarkPair& pair, const SampleMatrix& ys,
                                  std::size_t chains_per_y, const MalaConfig& cfg,
                                  const Seed& seed, bool final_only,
                                  std::vector<ChainDiagnostics>* diagnostics) {
  require_dim(ys.cols(), pair.dim(), "reverse sampler y file");
  const std::size_t n_y = static_cast<std::size_t>(ys.rows());
  const std::size_t chains = n_y * chains_per_y;
  const std::size_t per_chain = final_only ? 1 : cfg.steps - cfg.burn_in;
  SampleMatrix out(static_cast<Index>(chains * per_chain), pair.dim());
  std::vector<ChainDiagnostics> diag(chains);
  parallel_for(chains, [&](std::size_t c) {
    const Point y = ys.row(static_cast<Index>(c / chains_per_y)).transpose();
    const auto result = sample_reverse_conditional(pair, y, cfg, seed.substream(c + 1));
    diag[c] = result.diagnostics;
    const auto row = static_cast<Index>(c * per_chain);
    if (final_only) {
      out.row(row) = result.samples.row(result.samples.rows() - 1);
    } else {
      out.middleRows(row, static_cast<Index>(per_chain)) = result.samples;
    }
  });
  if (diagnostics != nullptr) *diagnostics = std::move(diag);
  return out;
}

PairedReverseSamples sample_reverse_paired(const BenchmarkPair& pair, const Seed& seed,
                                           std::size_t count, const MalaConfig& cfg) {
  const JointSamples joint = sample_joint(pair, seed, count);
  PairedReverseSamples out;
  out.y = joint.y;
  out.x.resize(static_cast<Index>(count), pair.dim());
  out.diagnostics.resize(count);
  parallel_for(count, [&](std::size_t i) {
    const Point y = joint.y.row(static_cast<Index>(i)).transpose();
    const Point start = joint.x.row(static_cast<Index>(i)).transpose();
    const auto result = mala_chain(reverse_target(pair, y), start, cfg.step_size, cfg.steps,
                                   seed.substream(2).substream(i), cfg.burn_in);
    out.x.row(static_cast<Index>(i)) = result.samples.row(result.samples.rows() - 1);
    out.diagnostics[i] = result.diagnostics;
  });
  return out;
}

}  // namespace eotbench
