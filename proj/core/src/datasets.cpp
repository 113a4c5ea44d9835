#include "eotbench/datasets.hpp"

#include <cmath>
#include <numbers>

namespace eotbench {

SampleMatrix make_two_moons(std::size_t count, double noise, const Seed& seed) {
  require(noise >= 0.0, ErrorCode::kInvalidArgument, "noise level must be non-negative");
  SampleMatrix out(static_cast<Index>(count), 2);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    const double s = std::numbers::pi * rng.uniform();
    const bool upper = i % 2 == 0;
    const double px = upper ? std::cos(s) : 1.0 - std::cos(s);
    const double py = upper ? std::sin(s) : 0.5 - std::sin(s);
    out(static_cast<Index>(i), 0) = px + noise * rng.normal();
    out(static_cast<Index>(i), 1) = py + noise * rng.normal();
  }
  return out;
}

SampleMatrix make_standard_normal(std::size_t count, Index dim, const Seed& seed) {
  SampleMatrix out(static_cast<Index>(count), dim);
  for (std::size_t i = 0; i < count; ++i) {
    CounterRng rng(seed, i);
    out.row(static_cast<Index>(i)) = rng.normal_vector(dim).transpose();
  }
  return out;
}

}  // namespace eotbench
