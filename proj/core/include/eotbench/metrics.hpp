#pragma once

#include "eotbench/sde.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace eotbench {

/// Gaussian approximation of a distribution (mean and covariance only).
struct GaussianFit {
  Point mean;
  SymMatrix covariance;
  std::size_t sample_count = 0;

  /// Unbiased sample covariance; a single sample gives zero covariance.
  static GaussianFit from_samples(const SampleMatrix& samples);
  static GaussianFit from_moments(const Moments& moments, std::size_t sample_count = 0);
};

/// Named metric value with everything needed to reproduce it.
struct MetricReport {
  std::string metric;
  double value = 0.0;
  /// Normaliser applied to the raw value, e.g. ½ Var(ℙ₁) for the UVP metrics.
  double normalization = 1.0;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<std::uint64_t> seed;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  std::string setting(const std::string& key) const;
};

/// Squared Bures–Wasserstein distance
///   ‖m_a − m_b‖² + Tr(S_a + S_b − 2 (S_b^½ S_a S_b^½)^½),
/// square roots via symmetric eigendecomposition with negative eigenvalues
/// clipped to zero. Identical fits give exactly zero.
double bw2_squared(const GaussianFit& a, const GaussianFit& b);

/// Symmetric PSD square root (negative eigenvalues clipped).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

/// 100 · BW₂²(fit(pred), fit(ref)) / (½ Tr Cov(ref)), in percent.
MetricReport bw2_uvp(const SampleMatrix& pred_samples, const SampleMatrix& ref_samples);

/// Same, against a reference given by its moments (e.g. target_moments).
MetricReport bw2_uvp(const SampleMatrix& pred_samples, const Moments& reference,
                     std::size_t reference_samples);

/// Draws `count` samples of the candidate π̂(·|x).
using ConditionalSampler =
    std::function<SampleMatrix(const Point& x, std::size_t count, const Seed& seed)>;
/// Returns the candidate's conditional moments directly.
using ConditionalMomentsFn = std::function<Moments(const Point& x)>;

struct CbwOptions {
  std::size_t samples_per_x = 1000;
  /// Source draws used by target_moments for Var(ℙ₁).
  std::size_t target_variance_samples = 100000;
};

/// Var(ℙ₁) = Tr Cov(ℙ₁) from the Rao-Blackwellised target moments.
double target_variance(const BenchmarkPair& pair, const Seed& seed, std::size_t count);

/// Conditional BW₂²-UVP: 100/(½ Var ℙ₁) · mean over test x of
/// BW₂²(π̂(·|x), π(·|x)), where π(·|x) uses the analytic conditional moments.
MetricReport cbw2_uvp(const BenchmarkPair& pair, const ConditionalSampler& predictor,
                      const SampleMatrix& test_x, const Seed& seed, const CbwOptions& options = {});

/// Variant with predictor moments supplied analytically (no sampling noise).
MetricReport cbw2_uvp_analytic(const BenchmarkPair& pair, const ConditionalMomentsFn& predictor,
                               const SampleMatrix& test_x, const Seed& seed,
                               const CbwOptions& options = {});

/// Variant over precomputed predictor samples: rows grouped by test x,
/// `samples_per_x` consecutive rows per point.
MetricReport cbw2_uvp_from_samples(const BenchmarkPair& pair, const SampleMatrix& test_x,
                                   const SampleMatrix& pred_samples, const Seed& seed,
                                   const CbwOptions& options = {});

/// Independent-plan baseline: ignores x and returns target draws.
ConditionalSampler independent_plan_sampler(const BenchmarkPair& pair);
/// Exact conditional sampler of the pair.
ConditionalSampler ground_truth_sampler(const BenchmarkPair& pair);

enum class DriftDirection {
  kForward,  // X_t from the truth-driven process
  kReverse,  // X_t from the candidate-driven process
};

/// L²[t_k] = E‖v(X_{t_k}, t_k) − v̂(X_{t_k}, t_k)‖² for k = 0..steps−1
/// (the drift is not evaluated at t = 1). Paths start at `source_draws`.
std::vector<double> l2_drift_discrepancy(const DriftField& truth, const DriftField& candidate,
                                         const SampleMatrix& source_draws, double epsilon,
                                         std::size_t steps, const Seed& seed,
                                         DriftDirection direction);

/// Same quantity from stored paths: states[p] holds grid rows 0..steps and
/// candidate_drifts[p] the candidate drift at those states (rows 0..steps−1
/// are used).
std::vector<double> l2_drift_discrepancy_from_paths(const DriftField& truth,
                                                    const std::vector<SampleMatrix>& states,
                                                    const std::vector<SampleMatrix>& candidate_drifts);

/// Drift evaluated for a whole population at once: row i of the result is the
/// drift at row i of `states`. External solvers are driven through this form
/// so that one round trip serves every path of a time step.
using BatchDrift = std::function<SampleMatrix(const SampleMatrix& states, double t)>;

BatchDrift batch_drift(const DriftField& field);

/// Same estimator as l2_drift_discrepancy, simulated step-synchronously. With
/// the same seed the noise (and therefore every state) matches the per-path
/// simulator exactly.
std::vector<double> l2_drift_discrepancy_batched(const DriftField& truth, const BatchDrift& candidate,
                                                 const SampleMatrix& source_draws, double epsilon,
                                                 std::size_t steps, const Seed& seed,
                                                 DriftDirection direction);

/// ∫₀¹ L²[t] dt: trapezoid over t_0..t_{K−1}, closing [t_{K−1}, 1] with the
/// last value (the integrand is undefined at t = 1).
double integrate_over_time(const std::vector<double>& per_step);

struct KlOptions {
  std::size_t steps = 200;
  std::size_t paths = 10000;
};

/// Girsanov KL(T_v ‖ T_v̂) = (1/2ε) ∫₀¹ L²_fwd[t] dt.
MetricReport kl_forward(const DriftField& truth, const DriftField& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options = {});
/// RKL with L²_rev (expectation over the candidate process).
MetricReport kl_reverse(const DriftField& truth, const DriftField& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options = {});

/// Same metrics with the candidate given as a batched drift (e.g. a subprocess).
MetricReport kl_forward(const DriftField& truth, const BatchDrift& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options = {});
MetricReport kl_reverse(const DriftField& truth, const BatchDrift& candidate,
                        const SourceDistribution& source, double epsilon, const Seed& seed,
                        const KlOptions& options = {});

/// Median pairwise Euclidean distance of the pooled sample.
double median_pairwise_distance(const SampleMatrix& a, const SampleMatrix& b);

/// RBF-kernel MMD², k(u, v) = exp(−‖u − v‖² / (2h²)). `value` is the unbiased
/// U-statistic; the biased V-statistic is recorded under "biased". Bandwidth
/// defaults to the median heuristic.
MetricReport mmd_rbf(const SampleMatrix& a, const SampleMatrix& b,
                     std::optional<double> bandwidth = std::nullopt);

}  // namespace eotbench
