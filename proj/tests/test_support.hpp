#pragma once

#include <random>

#include "spdsc/spd.hpp"

namespace spdsc::testing {

inline Matrix random_sym(std::mt19937_64& rng, Eigen::Index n,
                         double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Matrix g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = gauss(rng);
  }
  return sym_part(g);
}

/// Well-conditioned random SPD matrix: random orthogonal basis with
/// eigenvalues uniform in [0.5, 4].
inline SpdMatrix random_spd(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix s = random_sym(rng, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  std::uniform_real_distribution<double> uni(0.5, 4.0);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = uni(rng);
  return SpdMatrix::FromValidated(es.eigenvectors() * d.asDiagonal() *
                                  es.eigenvectors().transpose());
}

/// Random invertible matrix with singular values in [0.5, 2].
inline Matrix random_invertible(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = gauss(rng);
  }
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  std::uniform_real_distribution<double> uni(0.5, 2.0);
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = uni(rng);
  return q * d.asDiagonal();
}

/// Central finite-difference gradient of a scalar function of a symmetric
/// matrix, perturbing the upper triangle with symmetric unit directions.
template <typename F>
Matrix fd_gradient(F f, const Matrix& x, double h) {
  const Eigen::Index n = x.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      const double fp = f(x + h * e);
      const double fm = f(x - h * e);
      const double deriv = (fp - fm) / (2.0 * h);
      if (i == j) {
        g(i, i) = deriv;  // tr(G E) = G_ii for the diagonal direction
      } else {
        g(i, j) = 0.5 * deriv;  // tr(G E) = 2 G_ij off the diagonal
        g(j, i) = g(i, j);
      }
    }
  }
  return g;
}

}  // namespace spdsc::testing
