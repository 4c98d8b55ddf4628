#include "spdsc/divergences.hpp"

#include <cmath>

namespace spdsc {

namespace {

void check_dims(const SpdMatrix& x, const SpdMatrix& y, const char* who) {
  if (!x.sameDim(y)) {
    throw DimensionMismatch(std::string(who) + ": dimensions differ");
  }
}

}  // namespace

double airm_dist(const SpdMatrix& x, const SpdMatrix& y) {
  check_dims(x, y, "airm_dist");
  const SpdMatrix xis = spectral_inv_sqrt(x);
  const Matrix w = sym_part(xis.mat() * y.mat() * xis.mat());
  Eigen::SelfAdjointEigenSolver<Matrix> es(w);
  if (es.info() != Eigen::Success) {
    throw EigFailure("airm_dist: eigendecomposition failed");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double l = std::log(es.eigenvalues()[i]);
    acc += l * l;
  }
  return std::sqrt(acc);
}

double j_div(const SpdMatrix& x, const SpdMatrix& y) {
  check_dims(x, y, "j_div");
  const double n = static_cast<double>(x.dim());
  return 0.5 * (x.inverse() * y.mat()).trace() +
         0.5 * (y.inverse() * x.mat()).trace() - n;
}

double s_div(const SpdMatrix& x, const SpdMatrix& y) {
  check_dims(x, y, "s_div");
  const SpdMatrix mid = SpdMatrix::FromValidated(0.5 * (x.mat() + y.mat()));
  return mid.logdet() - 0.5 * (x.logdet() + y.logdet());
}

Matrix grad_j(const SpdMatrix& x, const SpdMatrix& y) {
  check_dims(x, y, "grad_j");
  return sym_part(0.5 * (y.inverse() - x.inverse() * y.mat() * x.inverse()));
}

Matrix grad_s(const SpdMatrix& x, const SpdMatrix& y) {
  check_dims(x, y, "grad_s");
  const SpdMatrix sum = SpdMatrix::FromValidated(x.mat() + y.mat());
  return sym_part(sum.inverse() - 0.5 * x.inverse());
}

SpdMatrix geo_mean_airm(const SpdMatrix& a, const SpdMatrix& b) {
  check_dims(a, b, "geo_mean_airm");
  const SpdMatrix as = spectral_sqrt(a);
  const SpdMatrix ais = spectral_inv_sqrt(a);
  const SpdMatrix inner = SpdMatrix::FromValidated(ais.mat() * b.mat() * ais.mat());
  const SpdMatrix root = spectral_sqrt(inner);
  return SpdMatrix::FromValidated(as.mat() * root.mat() * as.mat());
}

SpdMatrix riccati_solve(const SpdMatrix& p, const SpdMatrix& q) {
  if (!p.sameDim(q)) {
    throw DimensionMismatch("riccati_solve: dimensions differ");
  }
  const SpdMatrix qs = spectral_sqrt(q);
  const SpdMatrix qis = spectral_inv_sqrt(q);
  const SpdMatrix inner =
      SpdMatrix::FromValidated(qis.mat() * p.inverse() * qis.mat());
  const SpdMatrix root = spectral_sqrt(inner);
  return SpdMatrix::FromValidated(qs.mat() * root.mat() * qs.mat());
}

SpdMatrix geo_mean_j(const SpdMatrix& a, const SpdMatrix& b) {
  check_dims(a, b, "geo_mean_j");
  SpdMatrix p = SpdMatrix::FromValidated(a.inverse() + b.inverse());
  SpdMatrix q = SpdMatrix::FromValidated(a.mat() + b.mat());
  return riccati_solve(p, q);
}

SpdMatrix exp_map(const SpdMatrix& p, const Matrix& delta) {
  if (p.dim() != delta.rows() || p.dim() != delta.cols()) {
    throw DimensionMismatch("exp_map: dimensions differ");
  }
  const SpdMatrix ps = spectral_sqrt(p);
  const SpdMatrix pis = spectral_inv_sqrt(p);
  const SpdMatrix e = spectral_exp(pis.mat() * sym_part(delta) * pis.mat());
  return SpdMatrix::FromValidated(ps.mat() * e.mat() * ps.mat());
}

Matrix log_map(const SpdMatrix& p, const SpdMatrix& x) {
  check_dims(p, x, "log_map");
  const SpdMatrix ps = spectral_sqrt(p);
  const SpdMatrix pis = spectral_inv_sqrt(p);
  const SpdMatrix inner =
      SpdMatrix::FromValidated(pis.mat() * x.mat() * pis.mat());
  return sym_part(ps.mat() * spectral_log(inner) * ps.mat());
}

KarcherResult karcher_mean(const std::vector<SpdMatrix>& samples,
                           int max_iters, double tol) {
  if (samples.empty()) {
    throw std::invalid_argument("karcher_mean: empty sample set");
  }
  for (const auto& s : samples) {
    if (!s.sameDim(samples.front())) {
      throw DimensionMismatch("karcher_mean: dimensions differ");
    }
  }
  KarcherResult res{samples.front(), 0, true};
  if (samples.size() == 1) return res;
  const double inv_m = 1.0 / static_cast<double>(samples.size());
  for (int it = 0; it < max_iters; ++it) {
    Matrix tangent = Matrix::Zero(res.mean.dim(), res.mean.dim());
    for (const auto& s : samples) {
      tangent += log_map(res.mean, s);
    }
    tangent *= inv_m;
    res.iterations = it + 1;
    res.mean = exp_map(res.mean, tangent);
    if (tangent.norm() < tol) return res;
  }
  res.converged = false;
  return res;
}

}  // namespace spdsc
