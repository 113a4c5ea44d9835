#include "eotbench/pair.hpp"

#include <cmath>

namespace eotbench {

BenchmarkPair::BenchmarkPair(SourceDistribution source, LsePotential potential,
                             PairMetadata metadata)
    : source_(std::move(source)), potential_(std::move(potential)), metadata_(std::move(metadata)) {
  require_dim(source_.dim(), potential_.dim(), "source vs potential");
  require_appropriate(potential_);

  const double eps = potential_.epsilon();
  const double half_d_log_2pi = 0.5 * static_cast<double>(potential_.dim()) * kLog2Pi;
  auto cache = std::make_shared<std::vector<ComponentCache>>();
  cache->reserve(potential_.size());
  for (const auto& c : potential_.components()) {
    ComponentCache entry;
    entry.spectrum = Spectrum::of(c.matrix);
    entry.sigma = std::make_shared<const CovarianceFactor>(
        entry.spectrum.map([eps](double l) { return eps / (l + 1.0); }));
    entry.resolvent = entry.spectrum.map([](double l) { return 1.0 / (l + 1.0); });
    entry.mean_offset = entry.resolvent.apply(c.matrix.apply(c.center));
    entry.b_matrix = entry.spectrum.map([eps](double l) { return l / (eps * (l + 1.0)); });
    entry.log_prefix = c.log_weight + half_d_log_2pi + 0.5 * entry.sigma->log_det();
    cache->push_back(std::move(entry));
  }
  cache_ = std::move(cache);
}

}  // namespace eotbench
