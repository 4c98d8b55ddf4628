#include "spdsc/spd.hpp"

#include <cmath>

namespace spdsc {

namespace {

// Shared factorization path: expects a symmetric matrix.
struct Factored {
  Matrix inv;
  double logdet;
};

Factored factor_or_throw(const Matrix& s, const char* who) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(who) +
                              ": Cholesky factorization failed");
  }
  const Matrix l = llt.matrixL();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    logdet += std::log(l(i, i));
  }
  Factored f;
  f.inv = llt.solve(Matrix::Identity(s.rows(), s.cols()));
  f.inv = sym_part(f.inv);
  f.logdet = 2.0 * logdet;
  return f;
}

}  // namespace

SpdMatrix SpdMatrix::FromDense(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("SpdMatrix: input is not square");
  }
  const double scale = std::max(1.0, a.norm());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw NotSymmetric("SpdMatrix: asymmetry " + std::to_string(asym) +
                       " exceeds tolerance");
  }
  Matrix s = sym_part(a);
  Factored f = factor_or_throw(s, "SpdMatrix");
  return SpdMatrix(std::move(s), std::move(f.inv), f.logdet);
}

SpdMatrix SpdMatrix::FromValidated(const Matrix& a) {
  Matrix s = sym_part(a);
  Factored f = factor_or_throw(s, "SpdMatrix");
  return SpdMatrix(std::move(s), std::move(f.inv), f.logdet);
}

CholFactor chol(const SpdMatrix& m) {
  Eigen::LLT<Matrix> llt(m.mat());
  if (llt.info() != Eigen::Success) {
    throw NumericalBreakdown("chol: nonpositive pivot");
  }
  CholFactor f;
  f.lower = llt.matrixL();
  f.logdet = 0.0;
  for (Eigen::Index i = 0; i < f.lower.rows(); ++i) {
    f.logdet += 2.0 * std::log(f.lower(i, i));
  }
  return f;
}

SpdMatrix inv(const SpdMatrix& m) { return SpdMatrix::FromValidated(m.inverse()); }

namespace {

Eigen::SelfAdjointEigenSolver<Matrix> eig_or_throw(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) {
    throw EigFailure("symmetric eigendecomposition did not converge");
  }
  return es;
}

template <typename Fn>
Matrix apply_spectral(const Matrix& s, Fn fn) {
  auto es = eig_or_throw(s);
  Vector d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = fn(d[i]);
  return sym_part(es.eigenvectors() * d.asDiagonal() *
                  es.eigenvectors().transpose());
}

}  // namespace

Matrix spectral_log(const SpdMatrix& m) {
  return apply_spectral(m.mat(), [](double x) { return std::log(x); });
}

SpdMatrix spectral_exp(const Matrix& sym) {
  return SpdMatrix::FromValidated(
      apply_spectral(sym_part(sym), [](double x) { return std::exp(x); }));
}

SpdMatrix spectral_sqrt(const SpdMatrix& m) {
  return SpdMatrix::FromValidated(
      apply_spectral(m.mat(), [](double x) { return std::sqrt(x); }));
}

SpdMatrix spectral_inv_sqrt(const SpdMatrix& m) {
  return SpdMatrix::FromValidated(
      apply_spectral(m.mat(), [](double x) { return 1.0 / std::sqrt(x); }));
}

SpdMatrix nearest_spd(const Matrix& a, double eps) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("nearest_spd: input is not square");
  }
  Matrix s = sym_part(a);
  if (eps <= 0.0) {
    eps = std::max(1e-8 * s.trace() / static_cast<double>(s.rows()), 1e-12);
  }
  auto es = eig_or_throw(s);
  Vector d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = std::max(d[i], eps);
  return SpdMatrix::FromValidated(es.eigenvectors() * d.asDiagonal() *
                                  es.eigenvectors().transpose());
}

}  // namespace spdsc
