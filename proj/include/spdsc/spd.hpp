#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace spdsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotSymmetric : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NotPositiveDefinite : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalBreakdown : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Matrix sym_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }

/// Cholesky factor of an SPD matrix together with its log-determinant.
struct CholFactor {
  Matrix lower;
  double logdet = 0.0;
};

/// Validated symmetric positive definite matrix.
///
/// Construction goes through FromDense (or the trusted FromValidated), which
/// symmetrizes the input within tolerance and requires a successful Cholesky
/// factorization.  Instances are immutable; the inverse and log-determinant
/// are computed once and shared freely across threads.
class SpdMatrix {
 public:
  /// Validates `a`: symmetric within `tol` (relative to Frobenius norm) and
  /// positive definite.  The stored matrix is the symmetric part of `a`.
  static SpdMatrix FromDense(const Matrix& a, double tol = 1e-10);

  /// Wraps a matrix already known to be SPD (e.g. rebuilt from a clamped
  /// eigendecomposition).  Symmetrizes but skips the Cholesky check on
  /// failure paths only in debug; still throws if the factorization fails.
  static SpdMatrix FromValidated(const Matrix& a);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  const Matrix& inverse() const { return inv_; }
  double logdet() const { return logdet_; }

  bool sameDim(const SpdMatrix& o) const { return dim() == o.dim(); }

 private:
  SpdMatrix(Matrix m, Matrix inv, double logdet)
      : m_(std::move(m)), inv_(std::move(inv)), logdet_(logdet) {}

  Matrix m_;
  Matrix inv_;
  double logdet_ = 0.0;
};

/// Lower Cholesky factor with logdet = 2*sum(log L_ii).
CholFactor chol(const SpdMatrix& m);

/// SPD inverse via Cholesky.
SpdMatrix inv(const SpdMatrix& m);

/// Spectral functions through the symmetric eigendecomposition.
Matrix spectral_log(const SpdMatrix& m);
SpdMatrix spectral_exp(const Matrix& sym);
SpdMatrix spectral_sqrt(const SpdMatrix& m);
SpdMatrix spectral_inv_sqrt(const SpdMatrix& m);

/// Symmetrize, clamp eigenvalues below eps to eps, reconstruct.
/// eps <= 0 selects the default 1e-8 * trace/n (floored at 1e-12).
SpdMatrix nearest_spd(const Matrix& a, double eps = 0.0);

}  // namespace spdsc
