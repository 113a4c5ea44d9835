#pragma once

#include "eotbench/metrics.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace eotbench {

/// Line protocol for external drift evaluators. The harness writes one request
/// per line, "x1 … xD t", and the child answers each with "v1 … vD" in the
/// same order. Numbers are decimal text; requests carry 17 significant digits.
class DriftSubprocess {
 public:
  /// Starts argv[0] (searched in PATH) with the remaining arguments.
  DriftSubprocess(const std::vector<std::string>& argv, Index dim, std::size_t chunk_lines = 256);
  ~DriftSubprocess();

  DriftSubprocess(const DriftSubprocess&) = delete;
  DriftSubprocess& operator=(const DriftSubprocess&) = delete;

  Index dim() const { return dim_; }

  /// Row i of the result is the child's drift at (states.row(i), t).
  SampleMatrix evaluate(const SampleMatrix& states, double t);

  /// Closes the child's input and waits; returns its exit status.
  int finish();

 private:
  void exchange(const std::string& requests, std::size_t lines, double* out);

  Index dim_;
  std::size_t chunk_lines_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string pending_;
  std::size_t lines_sent_ = 0;
};

/// Adapts a running child to the batched-drift interface used by the metrics.
BatchDrift subprocess_batch_drift(std::shared_ptr<DriftSubprocess> child);

/// Server side of the protocol: answers requests from `in` until EOF. Blank
/// lines are skipped.
/// Throws kProtocol on a malformed request (the line number is reported).
void serve_drift(const DriftField& field, std::istream& in, std::ostream& out);

}  // namespace eotbench
