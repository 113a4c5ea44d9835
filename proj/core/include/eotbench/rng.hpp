#pragma once

#include "eotbench/types.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace eotbench {

/// Root of every random stream. Draw `i` of a sampler uses the engine keyed by
/// (value, stream, i), so results never depend on how draws are scheduled.
struct Seed {
  std::uint64_t value = 0;
  std::uint64_t stream = 0;

  /// Independent child stream, e.g. one per sub-task of a command.
  Seed substream(std::uint64_t tag) const;

  bool operator==(const Seed&) const = default;
};

/// xoshiro256** keyed through splitmix64. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(const Seed& seed, std::uint64_t index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  /// Vector of iid standard normals.
  Point normal_vector(Index dim);

 private:
  std::array<std::uint64_t, 4> state_{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace eotbench
