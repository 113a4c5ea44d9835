#pragma once

#include "eotbench/potential.hpp"
#include "eotbench/source.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace eotbench {

struct PairMetadata {
  std::string name = "pair";
  std::uint64_t seed = 0;
  std::string builder = "manual";
  /// True only for the published (D, ε) grid of the mixtures presets.
  bool published_preset = false;
  std::vector<std::pair<std::string, double>> parameters;
};

/// Quantities derived once per component of an appropriate potential.
struct ComponentCache {
  Spectrum spectrum;                        // eigen-decomposition of Aₙ
  std::shared_ptr<const CovarianceFactor> sigma;  // Σₙ = ε (Aₙ + I)⁻¹
  SymMatrix resolvent;                      // (Aₙ + I)⁻¹
  Point mean_offset;                        // (Aₙ + I)⁻¹ Aₙ bₙ
  SymMatrix b_matrix;                       // Bₙ = (1/ε) Aₙ (Aₙ + I)⁻¹
  double log_prefix = 0.0;                  // log wₙ + (D/2) log 2π + ½ log det Σₙ
};

/// Source law plus LSE potential: everything a solver needs to consume a
/// benchmark. Immutable; copies share the derived cache.
class BenchmarkPair {
 public:
  /// Throws kNotAppropriate unless validate_potential() accepts `potential`.
  BenchmarkPair(SourceDistribution source, LsePotential potential, PairMetadata metadata = {});

  const SourceDistribution& source() const { return source_; }
  const LsePotential& potential() const { return potential_; }
  const PairMetadata& metadata() const { return metadata_; }
  double epsilon() const { return potential_.epsilon(); }
  Index dim() const { return potential_.dim(); }
  std::size_t size() const { return potential_.size(); }

  const std::vector<ComponentCache>& cache() const { return *cache_; }
  const ComponentCache& cache(std::size_t n) const { return cache_->at(n); }
  std::shared_ptr<const std::vector<ComponentCache>> shared_cache() const { return cache_; }

 private:
  SourceDistribution source_;
  LsePotential potential_;
  PairMetadata metadata_;
  std::shared_ptr<const std::vector<ComponentCache>> cache_;
};

}  // namespace eotbench
