#pragma once

#include "eotbench/rng.hpp"

namespace eotbench {

/// Two interleaving half circles in the plane, the usual toy target:
/// the upper moon is (cos s, sin s), the lower one (1 − cos s, ½ − sin s),
/// s uniform on [0, π], plus isotropic Gaussian noise. Row i alternates
/// between the moons and draws from the stream (seed, i).
SampleMatrix make_two_moons(std::size_t count, double noise, const Seed& seed);

/// Rows of iid N(0, I) in the given dimension, row i from (seed, i).
SampleMatrix make_standard_normal(std::size_t count, Index dim, const Seed& seed);

}  // namespace eotbench
