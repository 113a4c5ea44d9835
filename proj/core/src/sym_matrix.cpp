#include "eotbench/sym_matrix.hpp"

#include <cmath>

namespace eotbench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDimensionMismatch: return "dimension_mismatch";
    case ErrorCode::kNotSymmetric: return "not_symmetric";
    case ErrorCode::kNotAppropriate: return "not_appropriate";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kDigestMismatch: return "digest_mismatch";
    case ErrorCode::kQuadrature: return "quadrature";
  }
  return "unknown";
}

bool all_finite(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return v.allFinite();
}

SymMatrix::SymMatrix(Index dim, double value) : dim_(dim), scalar_(true), value_(value) {}

SymMatrix::SymMatrix(Eigen::MatrixXd entries)
    : dim_(entries.rows()), scalar_(false), entries_(std::move(entries)) {}

SymMatrix SymMatrix::scalar_identity(Index dim, double value) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "matrix dimension must be positive");
  require(std::isfinite(value), ErrorCode::kNonFinite, "matrix scalar is not finite");
  return SymMatrix(dim, value);
}

double SymMatrix::symmetry_residual(const Eigen::MatrixXd& m) {
  const double scale = m.cwiseAbs().maxCoeff();
  const double residual = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (scale == 0.0) return residual;
  return residual / scale;
}

SymMatrix SymMatrix::dense(Eigen::MatrixXd entries) {
  require(entries.rows() >= 1, ErrorCode::kInvalidArgument, "matrix dimension must be positive");
  require_dim(entries.cols(), entries.rows(), "square matrix");
  require(entries.allFinite(), ErrorCode::kNonFinite, "matrix has non-finite entries");
  const double residual = symmetry_residual(entries);
  if (residual > kSymmetryTolerance) {
    throw Error(ErrorCode::kNotSymmetric,
                "matrix symmetry residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return SymMatrix(std::move(entries));
}

SymMatrix SymMatrix::symmetrized(const Eigen::MatrixXd& entries) {
  require_dim(entries.cols(), entries.rows(), "square matrix");
  require(entries.allFinite(), ErrorCode::kNonFinite, "matrix has non-finite entries");
  Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
  return SymMatrix(std::move(sym));
}

double SymMatrix::scalar_value() const {
  require(scalar_, ErrorCode::kInvalidArgument, "matrix is not in scalar form");
  return value_;
}

Eigen::MatrixXd SymMatrix::to_dense() const {
  if (scalar_) return value_ * Eigen::MatrixXd::Identity(dim_, dim_);
  return entries_;
}

Point SymMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  require_dim(v.size(), dim_, "matrix-vector product");
  if (scalar_) return value_ * v;
  return entries_ * v;
}

double SymMatrix::quad_form(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  require_dim(v.size(), dim_, "quadratic form");
  if (scalar_) return value_ * v.squaredNorm();
  return v.dot(entries_ * v);
}

double SymMatrix::trace() const {
  if (scalar_) return value_ * static_cast<double>(dim_);
  return entries_.trace();
}

double SymMatrix::min_eigenvalue() const {
  if (scalar_) return value_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool SymMatrix::operator==(const SymMatrix& other) const {
  if (dim_ != other.dim_ || scalar_ != other.scalar_) return false;
  if (scalar_) return value_ == other.value_;
  return entries_ == other.entries_;
}

Spectrum Spectrum::of(const SymMatrix& m) {
  Spectrum s;
  s.dim = m.dim();
  if (m.is_scalar()) {
    s.scalar = true;
    s.values = Eigen::VectorXd::Constant(1, m.scalar_value());
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.to_dense());
  require(solver.info() == Eigen::Success, ErrorCode::kDegenerate,
          "symmetric eigendecomposition failed");
  s.scalar = false;
  s.values = solver.eigenvalues();
  s.vectors = solver.eigenvectors();
  return s;
}

SymMatrix Spectrum::map(const std::function<double(double)>& g) const {
  if (scalar) return SymMatrix::scalar_identity(dim, g(values[0]));
  Eigen::VectorXd mapped = values.unaryExpr(g);
  return SymMatrix::symmetrized(vectors * mapped.asDiagonal() * vectors.transpose());
}

double Spectrum::sum(const std::function<double(double)>& g) const {
  if (scalar) return static_cast<double>(dim) * g(values[0]);
  double total = 0.0;
  for (Index i = 0; i < values.size(); ++i) total += g(values[i]);
  return total;
}

}  // namespace eotbench
