#include "spdsc/kernels.hpp"

#include <cmath>

namespace spdsc {

void validate_beta(const KernelSpec& spec) {
  if (!(spec.beta > 0.0)) {
    throw InvalidBeta("beta must be positive");
  }
  if (spec.kind == KernelKind::Jeffrey) return;
  if (spec.dim <= 0) {
    throw InvalidBeta("Stein kernel requires a known dimension");
  }
  const double bound = 0.5 * static_cast<double>(spec.dim - 1);
  if (spec.beta > bound) return;
  // Half-integer membership in {1/2, 1, ..., (n-1)/2}, tolerance 1e-12 on
  // beta itself.
  const double twice = 2.0 * spec.beta;
  if (std::abs(twice - std::round(twice)) <= 2e-12 &&
      std::round(twice) >= 1.0) {
    return;
  }
  throw InvalidBeta(
      "Stein kernel beta must be in {1/2, 1, 3/2, ..., (n-1)/2} or exceed "
      "(n-1)/2; got " +
      std::to_string(spec.beta) + " at n = " + std::to_string(spec.dim));
}

double k_eval(const SpdMatrix& x, const SpdMatrix& y, const KernelSpec& spec) {
  if (spec.dim > 0 && (x.dim() != spec.dim || y.dim() != spec.dim)) {
    throw DimensionMismatch("k_eval: matrix dimension does not match spec");
  }
  const double d = spec.kind == KernelKind::Jeffrey ? j_div(x, y) : s_div(x, y);
  return std::exp(-spec.beta * d);
}

GramCache gram(const std::vector<SpdMatrix>& atoms, const KernelSpec& spec) {
  const Eigen::Index n = static_cast<Eigen::Index>(atoms.size());
  GramCache cache;
  cache.kdd = Matrix::Zero(n, n);
  cache.atom_inverses.reserve(atoms.size());
  cache.atom_logdets.reserve(atoms.size());
  for (const auto& a : atoms) {
    cache.atom_inverses.push_back(a.inverse());
    cache.atom_logdets.push_back(a.logdet());
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    cache.kdd(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = k_eval(atoms[i], atoms[j], spec);
      cache.kdd(i, j) = v;
      cache.kdd(j, i) = v;
    }
  }
  return cache;
}

Vector cross_gram(const SpdMatrix& x, const std::vector<SpdMatrix>& atoms,
                  const KernelSpec& spec) {
  Vector k(static_cast<Eigen::Index>(atoms.size()));
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    k[static_cast<Eigen::Index>(i)] = k_eval(x, atoms[i], spec);
  }
  return k;
}

double cpd_form(const Matrix& k, const Vector& c) {
  if (k.rows() != c.size() || k.cols() != c.size()) {
    throw DimensionMismatch("cpd_form: sizes differ");
  }
  if (std::abs(c.sum()) > 1e-12) {
    throw CoefficientsNotZeroSum("cpd_form: coefficients must sum to zero");
  }
  return c.dot(k * c);
}

}  // namespace spdsc
