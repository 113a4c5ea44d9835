#include "eotbench/metrics.hpp"

#include "eotbench/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eotbench {

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Eigen::VectorXd clipped_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseMax(0.0);
}

}  // namespace

GaussianFit GaussianFit::from_samples(const SampleMatrix& samples) {
  require(samples.rows() >= 1, ErrorCode::kInvalidArgument, "Gaussian fit needs samples");
  const auto n = samples.rows();
  GaussianFit fit;
  fit.sample_count = static_cast<std::size_t>(n);
  fit.mean = samples.colwise().mean().transpose();
  if (n == 1) {
    fit.covariance = SymMatrix::symmetrized(Eigen::MatrixXd::Zero(samples.cols(), samples.cols()));
    return fit;
  }
  const Eigen::MatrixXd centred = samples.rowwise() - fit.mean.transpose();
  const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);
  fit.covariance = SymMatrix::symmetrized(cov);
  return fit;
}

GaussianFit GaussianFit::from_moments(const Moments& moments, std::size_t sample_count) {
  return {moments.mean, moments.covariance, sample_count};
}

void MetricReport::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : settings) {
    if (k == key) {
      v = value;
      return;
    }
  }
  settings.emplace_back(key, value);
}

void MetricReport::set(const std::string& key, double value) { set(key, format_double(value)); }

std::string MetricReport::setting(const std::string& key) const {
  for (const auto& [k, v] : settings) {
    if (k == key) return v;
  }
  return {};
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  const Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

double bw2_squared(const GaussianFit& a, const GaussianFit& b) {
  require_dim(a.mean.size(), b.mean.size(), "BW2 mean");
  require_dim(a.covariance.dim(), b.covariance.dim(), "BW2 covariance");
  if (a.mean == b.mean && a.covariance == b.covariance) return 0.0;
  const double mean_term = (a.mean - b.mean).squaredNorm();
  if (a.covariance.is_scalar() && b.covariance.is_scalar()) {
    const double sa = std::sqrt(std::max(0.0, a.covariance.scalar_value()));
    const double sb = std::sqrt(std::max(0.0, b.covariance.scalar_value()));
    return mean_term + static_cast<double>(a.mean.size()) * (sa - sb) * (sa - sb);
  }
  const Eigen::MatrixXd sa = a.covariance.to_dense();
  const Eigen::MatrixXd sb = b.covariance.to_dense();
  const Eigen::MatrixXd root_b = psd_sqrt(sb);
  Eigen::MatrixXd inner = root_b * sa * root_b;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = clipped_eigenvalues(inner).cwiseSqrt().sum();
  const double trace_a = clipped_eigenvalues(sa).sum();
  const double trace_b = clipped_eigenvalues(sb).sum();
  return std::max(0.0, mean_term + trace_a + trace_b - 2.0 * cross);
}

namespace {

MetricReport uvp_report(const GaussianFit& pred, const GaussianFit& ref) {
  const double variance = ref.covariance.trace();
  require(variance > 0.0, ErrorCode::kDegenerate, "reference variance is zero");
  MetricReport report;
  report.metric = "bw2_uvp";
  report.normalization = 0.5 * variance;
  report.value = 100.0 * bw2_squared(pred, ref) / report.normalization;
  report.set("pred_samples", static_cast<double>(pred.sample_count));
  report.set("ref_samples", static_cast<double>(ref.sample_count));
  report.set("ref_variance", variance);
  return report;
}

}  // namespace

MetricReport bw2_uvp(const SampleMatrix& pred_samples, const SampleMatrix& ref_samples) {
  require_dim(pred_samples.cols(), ref_samples.cols(), "bw2_uvp samples");
  return uvp_report(GaussianFit::from_samples(pred_samples), GaussianFit::from_samples(ref_samples));
}

MetricReport bw2_uvp(const SampleMatrix& pred_samples, const Moments& reference,
                     std::size_t reference_samples) {
  require_dim(pred_samples.cols(), reference.mean.size(), "bw2_uvp samples");
  auto report = uvp_report(GaussianFit::from_samples(pred_samples),
                           GaussianFit::from_moments(reference, reference_samples));
  report.set("reference", "moments");
  return report;
}

double target_variance(const BenchmarkPair& pair, const Seed& seed, std::size_t count) {
  return target_moments(pair, seed, count).covariance.trace();
}

namespace {

MetricReport cbw_report(const BenchmarkPair& pair, const SampleMatrix& test_x, const Seed& seed,
                        const CbwOptions& options,
                        const std::function<GaussianFit(std::size_t)>& predicted_fit,
                        const std::string& mode) {
  require(test_x.rows() >= 1, ErrorCode::kInvalidArgument, "cbw2_uvp needs test points");
  require_dim(test_x.cols(), pair.dim(), "cbw2_uvp test points");
  const std::size_t n = static_cast<std::size_t>(test_x.rows());
  std::vector<double> per_x(n);
  parallel_for(n, [&](std::size_t i) {
    const Point x = test_x.row(static_cast<Index>(i)).transpose();
    const GaussianFit truth =
        GaussianFit::from_moments(conditional_moments(conditional_plan(pair, x)));
    const GaussianFit pred = predicted_fit(i);
    require_dim(pred.mean.size(), pair.dim(), "predictor output");
    per_x[i] = bw2_squared(pred, truth);
  });
  double total = 0.0;
  for (double v : per_x) total += v;

  const double variance =
      target_variance(pair, seed.substream(0xB1), options.target_variance_samples);
  MetricReport report;
  report.metric = "cbw2_uvp";
  report.normalization = 0.5 * variance;
  report.value = 100.0 * (total / static_cast<double>(n)) / report.normalization;
  report.seed = seed.value;
  report.set("mode", mode);
  report.set("test_x", static_cast<double>(n));
  report.set("target_variance", variance);
  report.set("target_variance_samples", static_cast<double>(options.target_variance_samples));
  return report;
}

}  // namespace

MetricReport cbw2_uvp(const BenchmarkPair& pair, const ConditionalSampler& predictor,
                      const SampleMatrix& test_x, const Seed& seed, const CbwOptions& options) {
  require(options.samples_per_x >= 2, ErrorCode::kInvalidArgument,
          "cbw2_uvp needs at least two samples per x");
  auto report = cbw_report(
      pair, test_x, seed, options,
      [&](std::size_t i) {
        const Point x = test_x.row(static_cast<Index>(i)).transpose();
        const SampleMatrix draws = predictor(x, options.samples_per_x, seed.substream(i + 1));
        require(static_cast<std::size_t>(draws.rows()) == options.samples_per_x,
                ErrorCode::kDimensionMismatch, "predictor returned the wrong sample count");
        require_dim(draws.cols(), pair.dim(), "predictor output");
        return GaussianFit::from_samples(draws);
      },
      "sampled");
  report.set("samples_per_x", static_cast<double>(options.samples_per_x));
  return report;
}

MetricReport cbw2_uvp_analytic(const BenchmarkPair& pair, const ConditionalMomentsFn& predictor,
                               const SampleMatrix& test_x, const Seed& seed,
                               const CbwOptions& options) {
  return cbw_report(
      pair, test_x, seed, options,
      [&](std::size_t i) {
        return GaussianFit::from_moments(predictor(test_x.row(static_cast<Index>(i)).transpose()));
      },
      "analytic");
}

MetricReport cbw2_uvp_from_samples(const BenchmarkPair& pair, const SampleMatrix& test_x,
                                   const SampleMatrix& pred_samples, const Seed& seed,
                                   const CbwOptions& options) {
  require(test_x.rows() >= 1, ErrorCode::kInvalidArgument, "cbw2_uvp needs test points");
  require_dim(pred_samples.cols(), pair.dim(), "predicted samples");
  require(pred_samples.rows() % test_x.rows() == 0, ErrorCode::kDimensionMismatch,
          "predicted sample count is not a multiple of the test point count");
  const Index per_x = pred_samples.rows() / test_x.rows();
  require(per_x >= 2, ErrorCode::kInvalidArgument, "cbw2_uvp needs at least two samples per x");
  auto report = cbw_report(
      pair, test_x, seed, options,
      [&](std::size_t i) {
        return GaussianFit::from_samples(
            pred_samples.middleRows(static_cast<Index>(i) * per_x, per_x));
      },
      "file");
  report.set("samples_per_x", static_cast<double>(per_x));
  return report;
}

ConditionalSampler independent_plan_sampler(const BenchmarkPair& pair) {
  return [pair](const Point&, std::size_t count, const Seed& seed) {
    return sample_target(pair, seed, count);
  };
}

ConditionalSampler ground_truth_sampler(const BenchmarkPair& pair) {
  return [pair](const Point& x, std::size_t count, const Seed& seed) {
    return sample_conditional(conditional_plan(pair, x), seed, count);
  };
}

std::vector<double> l2_drift_discrepancy(const DriftField& truth, const DriftField& candidate,
                                         const SampleMatrix& source_draws, double epsilon,
                                         std::size_t steps, const Seed& seed,
                                         DriftDirection direction) {
  require_dim(candidate.dim(), truth.dim(), "candidate drift");
  const DriftField& driver = direction == DriftDirection::kForward ? truth : candidate;
  const std::size_t paths = static_cast<std::size_t>(source_draws.rows());
  require(paths >= 1, ErrorCode::kInvalidArgument, "drift discrepancy needs paths");
  // Paths sharing a reduction block are visited sequentially in path order.
  std::vector<std::vector<double>> block_sums(block_count(paths), std::vector<double>(steps, 0.0));
  const auto summary = simulate_paths(
      driver, source_draws, epsilon, steps, seed,
      [&](std::size_t p, std::size_t k, double t, const Point& state) {
        if (k >= steps) return;
        const Point diff = truth(state, t) - candidate(state, t);
        const double sq = diff.squaredNorm();
        if (!std::isfinite(sq)) {
          throw Error(ErrorCode::kNonFinite,
                      "non-finite drift discrepancy at time index " + std::to_string(k));
        }
        block_sums[p / kReductionBlock][k] += sq;
      });
  require(summary.failed == 0, ErrorCode::kNonFinite,
          std::to_string(summary.failed) + " simulated paths diverged");
  std::vector<double> per_t(steps, 0.0);
  for (const auto& block : block_sums) {
    for (std::size_t k = 0; k < steps; ++k) per_t[k] += block[k];
  }
  for (double& v : per_t) v /= static_cast<double>(paths);
  return per_t;
}

std::vector<double> l2_drift_discrepancy_from_paths(const DriftField& truth,
                                                    const std::vector<SampleMatrix>& states,
                                                    const std::vector<SampleMatrix>& candidate_drifts) {
  require(!states.empty(), ErrorCode::kInvalidArgument, "drift discrepancy needs paths");
  require(states.size() == candidate_drifts.size(), ErrorCode::kDimensionMismatch,
          "trajectory and drift files disagree in path count");
  const Index grid = states.front().rows();
  require(grid >= 2, ErrorCode::kInvalidArgument, "trajectories need at least two grid points");
  const std::size_t steps = static_cast<std::size_t>(grid - 1);
  const std::size_t paths = states.size();
  std::vector<std::vector<double>> block_sums(block_count(paths), std::vector<double>(steps, 0.0));
  parallel_blocks(paths, [&](std::size_t block, std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      require(states[p].rows() == grid && candidate_drifts[p].rows() >= grid - 1,
              ErrorCode::kDimensionMismatch, "path " + std::to_string(p) + " has the wrong length");
      for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(steps);
        const auto row = static_cast<Index>(k);
        const Point diff = truth(states[p].row(row).transpose(), t) -
                           candidate_drifts[p].row(row).transpose();
        block_sums[block][k] += diff.squaredNorm();
      }
    }
  });
  std::vector<double> per_t(steps, 0.0);
  for (const auto& block : block_sums) {
    for (std::size_t k = 0; k < steps; ++k) per_t[k] += block[k];
  }
  for (double& v : per_t) v /= static_cast<double>(paths);
  return per_t;
}

double integrate_over_time(const std::vector<double>& per_step) {
  require(!per_step.empty(), ErrorCode::kInvalidArgument, "nothing to integrate");
  const double dt = 1.0 / static_cast<double>(per_step.size());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < per_step.size(); ++k) {
    total += 0.5 * (per_step[k] + per_step[k + 1]) * dt;
  }
  return total + per_step.back() * dt;
}

BatchDrift batch_drift(const DriftField& field) {
  return [field](const SampleMatrix& states, double t) {
    SampleMatrix out(states.rows(), states.cols());
    parallel_for(static_cast<std::size_t>(states.rows()), [&](std::size_t i) {
      const auto row = static_cast<Index>(i);
      out.row(row) = field(states.row(row).transpose(), t).transpose();
    });
    return out;
  };
}

std::vector<double> l2_drift_discrepancy_batched(const DriftField& truth, const BatchDrift& candidate,
                                                 const SampleMatrix& source_draws, double epsilon,
                                                 std::size_t steps, const Seed& seed,
                                                 DriftDirection direction) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "simulation needs at least one step");
  require(epsilon > 0.0, ErrorCode::kInvalidArgument, "volatility epsilon must be positive");
  require_dim(source_draws.cols(), truth.dim(), "source draws vs drift");
  const std::size_t paths = static_cast<std::size_t>(source_draws.rows());
  require(paths >= 1, ErrorCode::kInvalidArgument, "drift discrepancy needs paths");
  const double dt = 1.0 / static_cast<double>(steps);
  const double noise_scale = std::sqrt(epsilon * dt);

  std::vector<CounterRng> rngs;
  rngs.reserve(paths);
  for (std::size_t p = 0; p < paths; ++p) rngs.emplace_back(seed, p);

  SampleMatrix states = source_draws;
  SampleMatrix truth_v(states.rows(), states.cols());
  std::vector<double> sq(paths);
  std::vector<double> per_t(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const SampleMatrix cand_v = candidate(states, t);
    require(cand_v.rows() == states.rows() && cand_v.cols() == states.cols(),
            ErrorCode::kDimensionMismatch,
            "candidate drift batch has the wrong shape at time index " + std::to_string(k));
    parallel_for(paths, [&](std::size_t p) {
      const auto row = static_cast<Index>(p);
      truth_v.row(row) = truth(states.row(row).transpose(), t).transpose();
      sq[p] = (truth_v.row(row) - cand_v.row(row)).squaredNorm();
    });
    double total = 0.0;
    for (double v : sq) total += v;
    require(std::isfinite(total), ErrorCode::kNonFinite,
            "non-finite drift discrepancy at time index " + std::to_string(k));
    per_t[k] = total / static_cast<double>(paths);

    const SampleMatrix& drive = direction == DriftDirection::kForward ? truth_v : cand_v;
    parallel_for(paths, [&](std::size_t p) {
      const auto row = static_cast<Index>(p);
      Point state = states.row(row).transpose();
      const Point v = drive.row(row).transpose();
      state += v * dt + noise_scale * rngs[p].normal_vector(state.size());
      states.row(row) = state.transpose();
    });
    require(states.allFinite(), ErrorCode::kNonFinite,
            "simulated paths diverged at time index " + std::to_string(k + 1));
  }
  return per_t;
}

namespace {

using DiscrepancyFn = std::function<std::vector<double>(const SampleMatrix& draws, const Seed& seed)>;

MetricReport kl_report(const DiscrepancyFn& discrepancy, const SourceDistribution& source,
                       Index dim, double epsilon, const Seed& seed, const KlOptions& options,
                       DriftDirection direction) {
  require(options.steps >= 1, ErrorCode::kInvalidArgument, "KL needs at least one step");
  require(options.paths >= 1, ErrorCode::kInvalidArgument, "KL needs at least one path");
  require_dim(source.dim(), dim, "KL source");
  SampleMatrix draws(static_cast<Index>(options.paths), source.dim());
  const Seed draw_seed = seed.substream(0);
  parallel_for(options.paths, [&](std::size_t i) {
    CounterRng rng(draw_seed, i);
    draws.row(static_cast<Index>(i)) = source.sample(rng).transpose();
  });
  const auto per_t = discrepancy(draws, seed.substream(1));
  const double integral = integrate_over_time(per_t);
  MetricReport report;
  report.metric = direction == DriftDirection::kForward ? "kl" : "rkl";
  report.normalization = 2.0 * epsilon;
  report.value = integral / report.normalization;
  report.seed = seed.value;
  report.set("steps", static_cast<double>(options.steps));
  report.set("paths", static_cast<double>(options.paths));
  report.set("epsilon", epsilon);
  report.set("l2_time_integral", integral);
  return report;
}

MetricReport kl_report(const DriftField& truth, const DriftField& candidate,
                       const SourceDistribution& source, double epsilon, const Seed& seed,
                       const KlOptions& options, DriftDirection direction) {
  require_dim(candidate.dim(), truth.dim(), "candidate drift");
  return kl_report(
      [&](const SampleMatrix& draws, const Seed& sim_seed) {
        return l2_drift_discrepancy(truth, candidate, draws, epsilon, options.steps, sim_seed,
                                    direction);
      },
      source, truth.dim(), epsilon, seed, options, direction);
}

MetricReport kl_report(const DriftField& truth, const BatchDrift& candidate,
                       const SourceDistribution& source, double epsilon, const Seed& seed,
                       const KlOptions& options, DriftDirection direction) {
  return kl_report(
      [&](const SampleMatrix& draws, const Seed& sim_seed) {
        return l2_drift_discrepancy_batched(truth, candidate, draws, epsilon, options.steps,
                                            sim_seed, direction);
      },
      source, truth.dim(), epsilon, seed, options, direction);
}

}  // namespace

MetricReport kl_forward(const DriftField& truth, const DriftField& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options) {
  return kl_report(truth, candidate, source, epsilon, seed, options, DriftDirection::kForward);
}

MetricReport kl_reverse(const DriftField& truth, const DriftField& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options) {
  return kl_report(truth, candidate, source, epsilon, seed, options, DriftDirection::kReverse);
}

MetricReport kl_forward(const DriftField& truth, const BatchDrift& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options) {
  return kl_report(truth, candidate, source, epsilon, seed, options, DriftDirection::kForward);
}

MetricReport kl_reverse(const DriftField& truth, const BatchDrift& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options) {
  return kl_report(truth, candidate, source, epsilon, seed, options, DriftDirection::kReverse);
}

namespace {

// Caps the pooled sample used for the median heuristic.
constexpr Index kMedianPoolCap = 2000;

}  // namespace

double median_pairwise_distance(const SampleMatrix& a, const SampleMatrix& b) {
  const Index na = std::min(a.rows(), kMedianPoolCap);
  const Index nb = std::min(b.rows(), kMedianPoolCap);
  SampleMatrix pooled(na + nb, a.cols());
  pooled.topRows(na) = a.topRows(na);
  pooled.bottomRows(nb) = b.topRows(nb);
  const Index n = pooled.rows();
  require(n >= 2, ErrorCode::kInvalidArgument, "median heuristic needs two points");
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) dists.push_back((pooled.row(i) - pooled.row(j)).norm());
  }
  auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  return *mid;
}

MetricReport mmd_rbf(const SampleMatrix& a, const SampleMatrix& b, std::optional<double> bandwidth) {
  require_dim(b.cols(), a.cols(), "MMD samples");
  require(a.rows() >= 2 && b.rows() >= 2, ErrorCode::kInvalidArgument,
          "unbiased MMD needs at least two samples per set");
  const double h = bandwidth ? *bandwidth : median_pairwise_distance(a, b);
  require(h > 0.0 && std::isfinite(h), ErrorCode::kDegenerate, "MMD bandwidth must be positive");
  const double gamma = 1.0 / (2.0 * h * h);

  // Row-block sums of k over (X, Y); diagonal terms kept separately.
  auto kernel_sum = [gamma](const SampleMatrix& x, const SampleMatrix& y, bool same) {
    const std::size_t rows = static_cast<std::size_t>(x.rows());
    std::vector<double> partial(block_count(rows), 0.0);
    parallel_blocks(rows, [&](std::size_t block, std::size_t begin, std::size_t end) {
      double s = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto xi = x.row(static_cast<Index>(i));
        for (Index j = 0; j < y.rows(); ++j) {
          if (same && j == static_cast<Index>(i)) continue;
          s += std::exp(-gamma * (xi - y.row(j)).squaredNorm());
        }
      }
      partial[block] = s;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
  };

  const double m = static_cast<double>(a.rows());
  const double n = static_cast<double>(b.rows());
  const double kaa = kernel_sum(a, a, true);
  const double kbb = kernel_sum(b, b, true);
  const double kab = kernel_sum(a, b, false);

  MetricReport report;
  report.metric = "mmd";
  report.value = kaa / (m * (m - 1.0)) + kbb / (n * (n - 1.0)) - 2.0 * kab / (m * n);
  const double biased = (kaa + m) / (m * m) + (kbb + n) / (n * n) - 2.0 * kab / (m * n);
  report.set("kernel", "rbf");
  report.set("bandwidth", h);
  report.set("bandwidth_rule", bandwidth ? "fixed" : "median");
  report.set("biased", biased);
  report.set("a_samples", m);
  report.set("b_samples", n);
  return report;
}

}  // namespace eotbench
