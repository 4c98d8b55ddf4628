#pragma once

#include <optional>
#include <vector>

#include "spdsc/divergences.hpp"
#include "spdsc/spd.hpp"

namespace spdsc {

struct InvalidBeta : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct CoefficientsNotZeroSum : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class KernelKind { Jeffrey, Stein };

/// Kernel family plus bandwidth.  For the Stein kernel, beta must lie in
/// {1/2, 1, 3/2, ..., (n-1)/2} or be greater than (n-1)/2; the Jeffrey
/// kernel accepts any positive beta.
struct KernelSpec {
  KernelKind kind = KernelKind::Stein;
  double beta = 0.5;
  Eigen::Index dim = 0;
};

/// Throws InvalidBeta unless the spec satisfies the validity rules above.
void validate_beta(const KernelSpec& spec);

/// exp(-beta * J(X,Y)) or exp(-beta * S(X,Y)); always in (0, 1].
double k_eval(const SpdMatrix& x, const SpdMatrix& y, const KernelSpec& spec);

/// Kernel matrix of a dictionary together with per-atom caches used by the
/// sparse solver and the dictionary updates.
struct GramCache {
  Matrix kdd;  // N x N, unit diagonal
  std::vector<Matrix> atom_inverses;
  std::vector<double> atom_logdets;

  Eigen::Index size() const { return kdd.rows(); }
};

GramCache gram(const std::vector<SpdMatrix>& atoms, const KernelSpec& spec);

/// [k(X, D_i)]_i for all atoms.
Vector cross_gram(const SpdMatrix& x, const std::vector<SpdMatrix>& atoms,
                  const KernelSpec& spec);

/// Quadratic form sum_ij c_i c_j K_ij for a zero-sum coefficient vector;
/// the conditional positive definiteness certificate.
double cpd_form(const Matrix& k, const Vector& c);

}  // namespace spdsc
