#pragma once

#include <cstdint>

#include "spdsc/dataset.hpp"

namespace spdsc {

/// Synthetic SPD classification task: class centers drawn as exponentials of
/// random tangents at the identity, samples as tangent perturbations of the
/// centers.  Everything stays exactly SPD by construction.
struct SynthSpec {
  int classes = 3;
  int per_class = 20;
  Eigen::Index dim = 5;
  double spread = 0.2;      // tangent-space noise scale
  double separation = 2.0;  // inter-center distance scale
  std::uint64_t seed = 0;
};

Dataset gen_synth(const SynthSpec& spec);

}  // namespace spdsc
