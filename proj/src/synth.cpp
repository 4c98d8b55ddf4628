#include "spdsc/synth.hpp"

#include <random>

#include "spdsc/divergences.hpp"

namespace spdsc {

namespace {

Matrix random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = gauss(rng);
  }
  // Normalized so the tangent scale parameters act as distances.
  Matrix s = sym_part(g);
  return s / s.norm();
}

}  // namespace

Dataset gen_synth(const SynthSpec& spec) {
  if (spec.classes < 1 || spec.per_class < 1 || spec.dim < 1 ||
      spec.spread <= 0.0 || spec.separation <= 0.0) {
    throw std::invalid_argument("gen_synth: invalid spec");
  }
  std::mt19937_64 rng(spec.seed);
  const SpdMatrix identity =
      SpdMatrix::FromValidated(Matrix::Identity(spec.dim, spec.dim));

  Dataset ds;
  ds.dim = spec.dim;
  ds.provenance = "gen_synth";
  for (int c = 0; c < spec.classes; ++c) {
    const SpdMatrix center =
        exp_map(identity, spec.separation * random_symmetric(rng, spec.dim));
    for (int i = 0; i < spec.per_class; ++i) {
      SpdMatrix sample =
          exp_map(center, spec.spread * random_symmetric(rng, spec.dim));
      ds.items.push_back({std::move(sample), "class" + std::to_string(c)});
    }
  }
  return ds;
}

}  // namespace spdsc
