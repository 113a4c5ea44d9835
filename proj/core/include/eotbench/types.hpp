#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace eotbench {

using Point = Eigen::VectorXd;
using Index = Eigen::Index;

/// Row-major sample block: one draw per row.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotSymmetric,
  kNotAppropriate,
  kDegenerate,
  kNonFinite,
  kFormat,
  kIo,
  kProtocol,
  kDigestMismatch,
  kQuadrature,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Generic so that literal messages are only turned into strings on failure.
template <class Message>
inline void require(bool condition, ErrorCode code, const Message& message) {
  if (!condition) throw Error(code, std::string(message));
}

inline void require_dim(Index got, Index expected, std::string_view what) {
  if (got != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected dimension " + std::to_string(expected) +
                    ", got " + std::to_string(got));
  }
}

bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace eotbench
