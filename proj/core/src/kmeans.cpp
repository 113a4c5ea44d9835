#include "eotbench/kmeans.hpp"

#include "eotbench/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace eotbench {

namespace {

SampleMatrix plus_plus_seeds(const SampleMatrix& data, std::size_t k, CounterRng& rng) {
  const Index n = data.rows();
  SampleMatrix centers(static_cast<Index>(k), data.cols());
  const auto first = static_cast<Index>(rng.uniform() * static_cast<double>(n));
  centers.row(0) = data.row(std::min(first, n - 1));
  Eigen::VectorXd nearest = (data.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Index i = 0; i < n; ++i) {
        cumulative += nearest[i];
        if (target < cumulative) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.uniform() * static_cast<double>(n));
    }
    centers.row(static_cast<Index>(c)) = data.row(pick);
    nearest = nearest.cwiseMin((data.rowwise() - centers.row(static_cast<Index>(c))).rowwise().squaredNorm());
  }
  return centers;
}

double assign(const SampleMatrix& data, const SampleMatrix& centers, std::vector<std::size_t>& labels,
              Eigen::VectorXd& dist) {
  const std::size_t n = static_cast<std::size_t>(data.rows());
  parallel_for(n, [&](std::size_t i) {
    const auto row = data.row(static_cast<Index>(i));
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (Index c = 0; c < centers.rows(); ++c) {
      const double d = (row - centers.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        best_c = static_cast<std::size_t>(c);
      }
    }
    labels[i] = best_c;
    dist[static_cast<Index>(i)] = best;
  });
  return dist.sum();
}

std::optional<KMeansResult> lloyd(const SampleMatrix& data, const KMeansOptions& options,
                                  CounterRng& rng) {
  const std::size_t k = options.clusters;
  const std::size_t n = static_cast<std::size_t>(data.rows());
  KMeansResult r;
  r.centers = plus_plus_seeds(data, k, rng);
  r.labels.assign(n, 0);
  Eigen::VectorXd dist(static_cast<Index>(n));
  double previous = std::numeric_limits<double>::infinity();
  std::size_t reseeds = 0;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    r.inertia = assign(data, r.centers, r.labels, dist);
    r.iterations = it + 1;

    SampleMatrix sums = SampleMatrix::Zero(static_cast<Index>(k), data.cols());
    r.counts.assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Index>(r.labels[i])) += data.row(static_cast<Index>(i));
      ++r.counts[r.labels[i]];
    }
    bool empty = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (r.counts[c] == 0) {
        empty = true;
        Index far = 0;
        dist.maxCoeff(&far);
        r.centers.row(static_cast<Index>(c)) = data.row(far);
        dist[far] = 0.0;
      } else {
        r.centers.row(static_cast<Index>(c)) = sums.row(static_cast<Index>(c)) / static_cast<double>(r.counts[c]);
      }
    }
    if (empty) {
      if (++reseeds > options.restarts) return std::nullopt;
      previous = std::numeric_limits<double>::infinity();
      continue;
    }
    if (std::abs(previous - r.inertia) <= options.tolerance * std::max(1.0, r.inertia)) break;
    previous = r.inertia;
  }
  r.inertia = assign(data, r.centers, r.labels, dist);
  r.counts.assign(k, 0);
  for (std::size_t label : r.labels) ++r.counts[label];
  for (std::size_t c = 0; c < k; ++c) {
    if (r.counts[c] == 0) return std::nullopt;
  }
  return r;
}

}  // namespace

KMeansResult kmeans(const SampleMatrix& data, const KMeansOptions& options, const Seed& seed) {
  require(options.clusters >= 1, ErrorCode::kInvalidArgument, "k-means needs at least one cluster");
  require(options.restarts >= 1, ErrorCode::kInvalidArgument, "k-means needs at least one restart");
  require(static_cast<std::size_t>(data.rows()) >= options.clusters, ErrorCode::kInvalidArgument,
          "k-means needs at least as many rows as clusters");
  require(data.allFinite(), ErrorCode::kNonFinite, "k-means data is not finite");

  std::optional<KMeansResult> best;
  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    CounterRng rng(seed, restart);
    auto run = lloyd(data, options, rng);
    if (!run) continue;
    run->restart = restart;
    if (!best || run->inertia < best->inertia) best = std::move(run);
  }
  require(best.has_value(), ErrorCode::kDegenerate,
          "k-means left an empty cluster in every restart");
  return *best;
}

}  // namespace eotbench
