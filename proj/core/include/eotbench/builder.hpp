#pragma once

#include "eotbench/kmeans.hpp"
#include "eotbench/pair.hpp"

#include <optional>

namespace eotbench {

/// Points drawn uniformly on the sphere of the given radius (normalized
/// Gaussian draws). Center i uses the stream (seed, i).
std::vector<Point> sphere_centers(Index dim, std::size_t count, double radius, const Seed& seed);

/// The mixtures benchmark family: Gaussian source N(0, s·I), N components on
/// a radius-R sphere, all sharing Aₙ = a·I.
struct MixturesPresetSpec {
  Index dim = 2;
  double epsilon = 1.0;
  std::size_t components = 5;
  double radius = 5.0;
  double source_variance = 0.25;
  std::uint64_t seed = 0;
  /// Replaces the tabulated matrix scale when set (the result is then
  /// tagged as a non-published configuration).
  std::optional<double> matrix_scale;
};

/// Tabulated scale a in Aₙ = a·I: 1/16 for ε ∈ {0.1, 1}; for ε = 10, 9/40 at
/// D = 2 and 1/100 otherwise. Other ε fall back to 1/16.
double preset_matrix_scale(Index dim, double epsilon);

/// True for the published grid D ∈ {2, 16, 64, 128}, ε ∈ {0.1, 1, 10}.
bool is_published_preset(Index dim, double epsilon);

/// Weights are chosen so that γₙ(x) is proportional to (1/N)·N(x | bₙ, Bₙ⁻¹):
///   log wₙ = ½ log det Bₙ − log N − D log 2π − ½ log det Σₙ.
/// Throws kDegenerate when some Bₙ is not positive definite.
BenchmarkPair build_mixtures_preset(const MixturesPresetSpec& spec);

struct DataRecipeSpec {
  SampleMatrix target;
  std::size_t clusters = 100;
  double lambda = 50.0;
  double epsilon = 0.05;
  std::size_t kmeans_iterations = 300;
  std::size_t kmeans_restarts = 10;
  std::uint64_t seed = 0;
  std::string name = "from-data";
};

struct DataFitReport {
  double inertia = 0.0;
  std::vector<std::size_t> cluster_counts;
  std::size_t kmeans_iterations = 0;
  std::size_t winning_restart = 0;
};

struct DataBuild {
  BenchmarkPair pair;
  DataFitReport report;
};

/// Gaussian with the sample mean and unbiased sample covariance of `data`.
SourceDistribution gaussian_fit_source(const SampleMatrix& data);

/// K-means centers become bₙ, Aₙ = λI and wₙ = 1/N.
DataBuild build_from_data(const DataRecipeSpec& spec, SourceDistribution source);

}  // namespace eotbench
