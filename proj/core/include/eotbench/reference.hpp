#pragma once

#include "eotbench/pair.hpp"

#include <string>

namespace eotbench {

struct ReferenceOptions {
  std::uint64_t probe_seed = 0;
  std::size_t plan_probes = 32;
  std::size_t drift_probes = 16;
  std::size_t density_probes = 16;
  double tolerance = 1e-9;
};

/// Golden values for cross-implementation checks, computed from the pair file
/// text (never from an in-memory pair, so every reader starts from the same
/// parsed numbers). The result is JSON with 17 significant digits and records
/// the pair digest. Values agree when |a − b| ≤ tolerance · max(1, |a|, |b|).
std::string export_reference_vectors(const std::string& pair_text, const ReferenceOptions& options);

struct VerifyResult {
  std::size_t values_checked = 0;
  std::size_t mismatches = 0;
  double max_error = 0.0;  // in units of the scaled tolerance denominator
  std::string first_mismatch;

  bool ok() const { return mismatches == 0; }
};

/// Recomputes every probe. Throws kDigestMismatch when the pair file is not
/// the one the references were generated from.
VerifyResult verify_reference_vectors(const std::string& pair_text, const std::string& reference_text);

}  // namespace eotbench
