#pragma once

#include <vector>

#include "spdsc/spd.hpp"

namespace spdsc {

struct RiccatiNotPD : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DivergenceKind { AIRM, Jeffrey, Stein };

/// Geodesic distance ||log(X^{-1/2} Y X^{-1/2})||_F, evaluated through the
/// eigenvalues of X^{-1/2} Y X^{-1/2} as sqrt(sum log^2 lambda_i).
double airm_dist(const SpdMatrix& x, const SpdMatrix& y);

/// Jeffrey (symmetric KL) divergence 0.5 tr(X^-1 Y) + 0.5 tr(Y^-1 X) - n.
double j_div(const SpdMatrix& x, const SpdMatrix& y);

/// Stein (Jensen-Bregman LogDet) divergence log|(X+Y)/2| - 0.5 log|XY|,
/// via Cholesky log-determinants.
double s_div(const SpdMatrix& x, const SpdMatrix& y);

/// Gradient of J(X, Y) in X: 0.5 (Y^-1 - X^-1 Y X^-1).
Matrix grad_j(const SpdMatrix& x, const SpdMatrix& y);

/// Gradient of S(X, Y) in X: (X+Y)^-1 - 0.5 X^-1.
Matrix grad_s(const SpdMatrix& x, const SpdMatrix& y);

/// Geodesic midpoint A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}.
SpdMatrix geo_mean_airm(const SpdMatrix& a, const SpdMatrix& b);

/// Unique SPD root D of D^{-1} Q D^{-1} = P, i.e. D P D = Q:
/// D = Q^{1/2} (Q^{-1/2} P^{-1} Q^{-1/2})^{1/2} Q^{1/2}.
SpdMatrix riccati_solve(const SpdMatrix& p, const SpdMatrix& q);

/// Geometric mean as the SPD solution of X (A^-1 + B^-1) X = A + B.
/// Coincides with geo_mean_airm.
SpdMatrix geo_mean_j(const SpdMatrix& a, const SpdMatrix& b);

/// exp_P(Delta) = P^{1/2} exp(P^{-1/2} Delta P^{-1/2}) P^{1/2}.
SpdMatrix exp_map(const SpdMatrix& p, const Matrix& delta);

/// Inverse of exp_map: log_P(X) = P^{1/2} log(P^{-1/2} X P^{-1/2}) P^{1/2}.
Matrix log_map(const SpdMatrix& p, const SpdMatrix& x);

struct KarcherResult {
  SpdMatrix mean;
  int iterations = 0;
  bool converged = true;
};

/// Frechet mean under AIRM by tangent-space averaging.
KarcherResult karcher_mean(const std::vector<SpdMatrix>& samples,
                           int max_iters = 100, double tol = 1e-9);

}  // namespace spdsc
