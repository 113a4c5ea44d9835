#pragma once

#include "eotbench/sde.hpp"

#include <string>
#include <vector>

namespace eotbench {

/// Writes `contents` to a sibling temporary file and renames it over `path`,
/// so readers never observe a half-written file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// Sample tensor: a text header line "{count} {dim} f64le" followed by
/// count·dim little-endian doubles, row-major.
std::string encode_tensor(const SampleMatrix& samples);
SampleMatrix decode_tensor(const std::string& bytes);
void write_tensor(const std::string& path, const SampleMatrix& samples);

/// Comma separated, 17 significant digits, header x0,x1,...; limited to
/// dim ≤ 8 to keep exports human-sized.
inline constexpr Index kCsvMaxDim = 8;
std::string encode_csv(const SampleMatrix& samples);
void write_csv(const std::string& path, const SampleMatrix& samples);
/// Reads CSV whose first line may be a non-numeric header.
SampleMatrix decode_csv(const std::string& text);

/// Detects the binary header; anything else is parsed as CSV.
SampleMatrix read_samples(const std::string& path);

/// Trajectory bundle: header "{paths} {steps+1} {dim} f64le" and the states
/// path-major (all grid nodes of path 0, then path 1, ...).
std::string encode_trajectories(const std::vector<SampleMatrix>& paths);
std::vector<SampleMatrix> decode_trajectories(const std::string& bytes);
void write_trajectories(const std::string& path, const std::vector<SampleMatrix>& paths);
std::vector<SampleMatrix> read_trajectories(const std::string& path);

}  // namespace eotbench
