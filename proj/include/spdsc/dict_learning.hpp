#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdsc/dataset.hpp"
#include "spdsc/sparse_coding.hpp"

namespace spdsc {

struct AtomUnused : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Ordered set of SPD atoms with optional per-atom class labels.
struct Dictionary {
  std::vector<SpdMatrix> atoms;
  std::vector<std::string> labels;  // empty, or one per atom

  Eigen::Index size() const { return static_cast<Eigen::Index>(atoms.size()); }
  Eigen::Index dim() const { return atoms.empty() ? 0 : atoms.front().dim(); }
  bool labeled() const { return !labels.empty(); }

  std::vector<std::string> classes() const;

  static Dictionary FromDataset(const Dataset& ds);
  Dataset ToDataset() const;
};

enum class InitMethod { RandomSubset, IntrinsicKmeans };

struct LearnConfig {
  Eigen::Index n_atoms = 8;
  int iters = 10;
  KernelSpec kernel;
  double lambda = 0.1;
  InitMethod init = InitMethod::RandomSubset;
  std::uint64_t seed = 0;
  SolverConfig solver;
};

struct LearnTrace {
  double initial_energy = 0.0;
  std::vector<double> energies;      // after each outer iteration
  std::vector<int> projections;      // atoms projected per iteration
  std::vector<int> unused_atoms;     // atoms skipped per iteration
  bool improved = true;
};

/// Sum over samples of the sparse-coding objective under the given codes.
double energy(const Dataset& data, const Dictionary& dict,
              const KernelSpec& spec, double lambda,
              const std::vector<SparseCode>& codes);

struct AtomUpdate {
  SpdMatrix atom;
  bool projected = false;
};

/// Closed-form Riccati update of atom r for the Jeffrey kernel, with the
/// kernel values frozen at the atom's previous value.  Throws AtomUnused
/// when no code uses the atom.
AtomUpdate update_atom_j(Eigen::Index r, const Dataset& data,
                         const std::vector<SparseCode>& codes,
                         const Dictionary& dict, const KernelSpec& spec);

/// Fixed-point update of atom r for the Stein kernel, reusing the previous
/// iterate's (X + D_r)^{-1}, (D_j + D_r)^{-1} and kernel values.
AtomUpdate update_atom_s(Eigen::Index r, const Dataset& data,
                         const std::vector<SparseCode>& codes,
                         const Dictionary& dict, const KernelSpec& spec);

/// Intrinsic k-means under the AIRM distance with Karcher-mean centroids.
Dictionary kmeans_init(const Dataset& data, Eigen::Index n_atoms,
                       std::uint64_t seed, int max_iters = 20);

std::pair<Dictionary, LearnTrace> learn(const Dataset& data,
                                        const LearnConfig& cfg);

/// Residual-error classification against a labeled dictionary.
std::string classify(const SpdMatrix& x, const Dictionary& dict,
                     const KernelSpec& spec, const SolverConfig& cfg);

}  // namespace spdsc
