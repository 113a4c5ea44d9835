#pragma once

#include "eotbench/pair.hpp"

#include <string>

namespace eotbench {

inline constexpr int kPairFormatVersion = 1;

/// Human-readable pair definition (JSON). Only the undecorated parameters are
/// written: weights wₙ, centers bₙ, matrices Aₙ (a number for a·I, otherwise
/// a list of rows). Reals carry 17 significant digits.
std::string serialize_pair(const BenchmarkPair& pair);

/// Parses and validates; format errors name the offending field.
BenchmarkPair parse_pair(const std::string& text);

BenchmarkPair load_pair(const std::string& path);
void save_pair(const std::string& path, const BenchmarkPair& pair);

/// Compact form with sorted keys; insensitive to whitespace and key order.
std::string canonical_pair_text(const std::string& text);

/// SHA-256 (hex) of the canonical form of a pair file's text.
std::string pair_text_digest(const std::string& text);
std::string pair_digest(const BenchmarkPair& pair);

std::string sha256_hex(const std::string& bytes);

/// printf("%.17g"), enough digits for an exact double round trip.
std::string format_real(double value);

}  // namespace eotbench
