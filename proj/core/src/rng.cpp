#include "eotbench/rng.hpp"

namespace eotbench {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Seed Seed::substream(std::uint64_t tag) const {
  std::uint64_t mix = stream ^ (tag * 0xD1B54A32D192ED03ULL);
  return Seed{value, splitmix64(mix)};
}

CounterRng::CounterRng(const Seed& seed, std::uint64_t index) {
  std::uint64_t key = seed.value;
  std::uint64_t a = splitmix64(key);
  key ^= seed.stream * 0x9E3779B97F4A7C15ULL;
  std::uint64_t b = splitmix64(key);
  key ^= index * 0xC2B2AE3D27D4EB4FULL;
  std::uint64_t c = splitmix64(key);
  std::uint64_t mixer = a ^ rotl(b, 21) ^ rotl(c, 42);
  for (auto& word : state_) word = splitmix64(mixer);
}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::normal() { return normal_(*this); }

Point CounterRng::normal_vector(Index dim) {
  Point z(dim);
  for (Index i = 0; i < dim; ++i) z[i] = normal();
  return z;
}

}  // namespace eotbench
