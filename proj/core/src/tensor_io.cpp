#include "eotbench/tensor_io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace eotbench {

namespace {

constexpr std::string_view kTag = "f64le";

void append_doubles(std::string& out, const double* data, std::size_t n) {
  const std::size_t offset = out.size();
  out.resize(offset + n * sizeof(double));
  if constexpr (std::endian::native == std::endian::little) {
    if (n > 0) std::memcpy(out.data() + offset, data, n * sizeof(double));
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const auto bits = __builtin_bswap64(std::bit_cast<std::uint64_t>(data[i]));
      std::memcpy(out.data() + offset + i * sizeof(double), &bits, sizeof(bits));
    }
  }
}

void read_doubles(const char* src, double* dst, std::size_t n) {
  if (n > 0) std::memcpy(dst, src, n * sizeof(double));
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < n; ++i) {
      dst[i] = std::bit_cast<double>(__builtin_bswap64(std::bit_cast<std::uint64_t>(dst[i])));
    }
  }
}

// Splits the first line off; returns the integer fields when it is a binary
// header with `fields` integers followed by the tag.
bool parse_header(const std::string& bytes, std::size_t fields, std::vector<std::size_t>& values,
                  std::size_t& payload_offset) {
  const auto newline = bytes.find('\n');
  if (newline == std::string::npos || newline > 256) return false;
  std::istringstream line(bytes.substr(0, newline));
  values.assign(fields, 0);
  for (std::size_t i = 0; i < fields; ++i) {
    long long v = -1;
    if (!(line >> v) || v < 0) return false;
    values[i] = static_cast<std::size_t>(v);
  }
  std::string tag;
  if (!(line >> tag) || tag != kTag) return false;
  std::string extra;
  if (line >> extra) return false;
  payload_offset = newline + 1;
  return true;
}

std::string format_17(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::kIo, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    require(static_cast<bool>(out), ErrorCode::kIo, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIo, "cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::kIo, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string encode_tensor(const SampleMatrix& samples) {
  std::string out = std::to_string(samples.rows()) + " " + std::to_string(samples.cols()) + " " +
                    std::string(kTag) + "\n";
  append_doubles(out, samples.data(), static_cast<std::size_t>(samples.size()));
  return out;
}

SampleMatrix decode_tensor(const std::string& bytes) {
  std::vector<std::size_t> h;
  std::size_t offset = 0;
  require(parse_header(bytes, 2, h, offset), ErrorCode::kFormat,
          "sample tensor header must read '{count} {dim} f64le'");
  const std::size_t n = h[0] * h[1];
  require(bytes.size() - offset == n * sizeof(double), ErrorCode::kFormat,
          "sample tensor payload has " + std::to_string(bytes.size() - offset) +
              " bytes, header promises " + std::to_string(n * sizeof(double)));
  SampleMatrix out(static_cast<Index>(h[0]), static_cast<Index>(h[1]));
  read_doubles(bytes.data() + offset, out.data(), n);
  return out;
}

void write_tensor(const std::string& path, const SampleMatrix& samples) {
  write_file_atomic(path, encode_tensor(samples));
}

std::string encode_csv(const SampleMatrix& samples) {
  require(samples.cols() <= kCsvMaxDim, ErrorCode::kInvalidArgument,
          "CSV export is limited to dimension " + std::to_string(kCsvMaxDim));
  std::string out;
  for (Index j = 0; j < samples.cols(); ++j) out += (j ? ",x" : "x") + std::to_string(j);
  out += '\n';
  for (Index i = 0; i < samples.rows(); ++i) {
    for (Index j = 0; j < samples.cols(); ++j) {
      if (j) out += ',';
      out += format_17(samples(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const SampleMatrix& samples) {
  write_file_atomic(path, encode_csv(samples));
}

SampleMatrix decode_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    bool numeric = true;
    std::size_t start = 0;
    while (start <= line.size()) {
      auto end = line.find(',', start);
      if (end == std::string::npos) end = line.size();
      std::string cell = line.substr(start, end - start);
      const auto first = cell.find_first_not_of(" \t");
      const auto last = cell.find_last_not_of(" \t");
      cell = first == std::string::npos ? "" : cell.substr(first, last - first + 1);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
      start = end + 1;
    }
    if (!numeric) {
      require(rows.empty() && line_no == 1, ErrorCode::kFormat,
              "non-numeric CSV cell on line " + std::to_string(line_no));
      continue;  // header
    }
    require(rows.empty() || row.size() == rows.front().size(), ErrorCode::kFormat,
            "CSV line " + std::to_string(line_no) + " has a different column count");
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), ErrorCode::kFormat, "CSV contains no data rows");
  SampleMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return out;
}

SampleMatrix read_samples(const std::string& path) {
  const std::string bytes = read_file(path);
  std::vector<std::size_t> h;
  std::size_t offset = 0;
  if (parse_header(bytes, 2, h, offset)) return decode_tensor(bytes);
  return decode_csv(bytes);
}

std::string encode_trajectories(const std::vector<SampleMatrix>& paths) {
  const Index grid = paths.empty() ? 0 : paths.front().rows();
  const Index dim = paths.empty() ? 0 : paths.front().cols();
  std::string out = std::to_string(paths.size()) + " " + std::to_string(grid) + " " +
                    std::to_string(dim) + " " + std::string(kTag) + "\n";
  for (const auto& p : paths) {
    require(p.rows() == grid && p.cols() == dim, ErrorCode::kDimensionMismatch,
            "all trajectories must share grid length and dimension");
    append_doubles(out, p.data(), static_cast<std::size_t>(p.size()));
  }
  return out;
}

std::vector<SampleMatrix> decode_trajectories(const std::string& bytes) {
  std::vector<std::size_t> h;
  std::size_t offset = 0;
  require(parse_header(bytes, 3, h, offset), ErrorCode::kFormat,
          "trajectory header must read '{paths} {steps+1} {dim} f64le'");
  const std::size_t per_path = h[1] * h[2];
  require(bytes.size() - offset == h[0] * per_path * sizeof(double), ErrorCode::kFormat,
          "trajectory payload size disagrees with its header");
  std::vector<SampleMatrix> out(h[0]);
  for (std::size_t p = 0; p < h[0]; ++p) {
    out[p].resize(static_cast<Index>(h[1]), static_cast<Index>(h[2]));
    read_doubles(bytes.data() + offset + p * per_path * sizeof(double), out[p].data(), per_path);
  }
  return out;
}

void write_trajectories(const std::string& path, const std::vector<SampleMatrix>& paths) {
  write_file_atomic(path, encode_trajectories(paths));
}

std::vector<SampleMatrix> read_trajectories(const std::string& path) {
  return decode_trajectories(read_file(path));
}

}  // namespace eotbench
