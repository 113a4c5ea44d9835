#include "eotbench/builder.hpp"

#include <cmath>

namespace eotbench {

std::vector<Point> sphere_centers(Index dim, std::size_t count, double radius, const Seed& seed) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "sphere dimension must be positive");
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::kInvalidArgument,
          "sphere radius must be positive");
  std::vector<Point> centers;
  centers.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    Point z = rng.normal_vector(dim);
    double norm = z.norm();
    while (norm == 0.0) {
      z = rng.normal_vector(dim);
      norm = z.norm();
    }
    centers.push_back(z * (radius / norm));
  }
  return centers;
}

double preset_matrix_scale(Index dim, double epsilon) {
  if (epsilon == 10.0) return dim == 2 ? 9.0 / 40.0 : 1.0 / 100.0;
  return 1.0 / 16.0;
}

bool is_published_preset(Index dim, double epsilon) {
  const bool dim_ok = dim == 2 || dim == 16 || dim == 64 || dim == 128;
  const bool eps_ok = epsilon == 0.1 || epsilon == 1.0 || epsilon == 10.0;
  return dim_ok && eps_ok;
}

BenchmarkPair build_mixtures_preset(const MixturesPresetSpec& spec) {
  require(spec.dim >= 1, ErrorCode::kInvalidArgument, "preset dimension must be positive");
  require(spec.epsilon > 0.0 && std::isfinite(spec.epsilon), ErrorCode::kInvalidArgument,
          "preset epsilon must be positive");
  require(spec.components >= 1, ErrorCode::kInvalidArgument, "preset needs at least one component");
  require(spec.source_variance > 0.0, ErrorCode::kInvalidArgument,
          "source variance must be positive");

  const Index d = spec.dim;
  const double eps = spec.epsilon;
  const double a = spec.matrix_scale.value_or(preset_matrix_scale(d, eps));
  require(a > -1.0 + kAppropriateMargin, ErrorCode::kNotAppropriate,
          "matrix scale must exceed -1");
  // Bₙ = a / (ε (a + 1)) and Σₙ = ε / (a + 1), both multiples of I.
  const double b_scale = a / (eps * (a + 1.0));
  require(b_scale > 0.0, ErrorCode::kDegenerate,
          "B = (1/eps) I - Sigma/eps^2 is not positive definite, the uniform weight rule "
          "cannot be realized");
  const double sigma_scale = eps / (a + 1.0);
  const double dd = static_cast<double>(d);
  const double log_w = 0.5 * dd * std::log(b_scale) - std::log(static_cast<double>(spec.components)) -
                       dd * kLog2Pi - 0.5 * dd * std::log(sigma_scale);

  const auto centers = sphere_centers(d, spec.components, spec.radius, Seed{spec.seed, 0});
  std::vector<LseComponent> components;
  components.reserve(spec.components);
  for (const Point& b : centers) {
    components.push_back({log_w, b, SymMatrix::scalar_identity(d, a)});
  }

  PairMetadata meta;
  meta.name = "mixtures-d" + std::to_string(d) + "-eps" + [&] {
    std::string s = std::to_string(eps);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }();
  meta.seed = spec.seed;
  meta.builder = "preset-mixtures";
  meta.published_preset = is_published_preset(d, eps) && !spec.matrix_scale.has_value();
  meta.parameters = {{"components", static_cast<double>(spec.components)},
                     {"radius", spec.radius},
                     {"source_variance", spec.source_variance},
                     {"matrix_scale", a}};

  auto source = SourceDistribution::gaussian(Point::Zero(d),
                                             SymMatrix::scalar_identity(d, spec.source_variance));
  return BenchmarkPair(std::move(source), LsePotential(eps, std::move(components)), std::move(meta));
}

SourceDistribution gaussian_fit_source(const SampleMatrix& data) {
  require(data.rows() >= 2, ErrorCode::kInvalidArgument,
          "a Gaussian fit needs at least two samples");
  require(data.allFinite(), ErrorCode::kNonFinite, "source dataset is not finite");
  const Point mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - mean.transpose();
  const Eigen::MatrixXd cov =
      (centered.transpose() * centered) / static_cast<double>(data.rows() - 1);
  return SourceDistribution::gaussian(mean, SymMatrix::symmetrized(cov));
}

DataBuild build_from_data(const DataRecipeSpec& spec, SourceDistribution source) {
  require(spec.lambda > 0.0, ErrorCode::kInvalidArgument, "lambda must be positive");
  require(spec.epsilon > 0.0, ErrorCode::kInvalidArgument, "epsilon must be positive");
  require(spec.target.rows() >= 1, ErrorCode::kInvalidArgument, "target dataset is empty");
  require_dim(source.dim(), spec.target.cols(), "source vs target dataset");

  KMeansOptions options;
  options.clusters = spec.clusters;
  options.max_iterations = spec.kmeans_iterations;
  options.restarts = spec.kmeans_restarts;
  const KMeansResult km = kmeans(spec.target, options, Seed{spec.seed, 0});

  const Index d = spec.target.cols();
  const double log_w = -std::log(static_cast<double>(spec.clusters));
  std::vector<LseComponent> components;
  components.reserve(spec.clusters);
  for (Index c = 0; c < km.centers.rows(); ++c) {
    components.push_back({log_w, km.centers.row(c).transpose(), SymMatrix::scalar_identity(d, spec.lambda)});
  }

  PairMetadata meta;
  meta.name = spec.name;
  meta.seed = spec.seed;
  meta.builder = "from-data";
  meta.parameters = {{"clusters", static_cast<double>(spec.clusters)},
                     {"lambda", spec.lambda},
                     {"kmeans_inertia", km.inertia}};

  DataFitReport report{km.inertia, km.counts, km.iterations, km.restart};
  return {BenchmarkPair(std::move(source), LsePotential(spec.epsilon, std::move(components)),
                        std::move(meta)),
          std::move(report)};
}

}  // namespace eotbench
