#pragma once

#include "eotbench/rng.hpp"

#include <vector>

namespace eotbench {

struct KMeansOptions {
  std::size_t clusters = 8;
  std::size_t max_iterations = 300;
  std::size_t restarts = 10;
  double tolerance = 1e-10;  // relative inertia change that stops Lloyd
};

struct KMeansResult {
  SampleMatrix centers;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> counts;
  double inertia = 0.0;
  std::size_t iterations = 0;
  std::size_t restart = 0;  // index of the winning restart
};

/// Lloyd iterations from k-means++ seeds; best of `restarts` runs by inertia.
/// A cluster left empty after assignment is re-seeded at the point farthest
/// from its center; once that fails too the restart is discarded.
KMeansResult kmeans(const SampleMatrix& data, const KMeansOptions& options, const Seed& seed);

}  // namespace eotbench
