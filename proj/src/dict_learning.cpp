#include "spdsc/dict_learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace spdsc {

namespace {

bool is_pd(const Matrix& a) {
  Eigen::LLT<Matrix> llt(sym_part(a));
  return llt.info() == Eigen::Success;
}

double clamp_eps(const Matrix& a) {
  const double t = std::abs(a.trace()) / static_cast<double>(a.rows());
  return 1e-8 * std::max(1.0, t);
}

std::vector<SparseCode> code_all(const Dataset& data, const Dictionary& dict,
                                 const KernelSpec& spec,
                                 const SolverConfig& solver) {
  const GramCache cache = gram(dict.atoms, spec);
  std::vector<SparseCode> codes;
  codes.reserve(data.size());
  for (const auto& item : data.items) {
    const Vector kxd = cross_gram(item.mat, dict.atoms, spec);
    codes.push_back(kfss(cache, kxd, 1.0, solver));
  }
  return codes;
}

std::vector<Eigen::Index> draw_distinct(std::size_t population,
                                        Eigen::Index count,
                                        std::uint64_t seed) {
  std::vector<Eigen::Index> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(count));
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

std::vector<std::string> Dictionary::classes() const {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

Dictionary Dictionary::FromDataset(const Dataset& ds) {
  Dictionary d;
  d.atoms.reserve(ds.size());
  for (const auto& it : ds.items) d.atoms.push_back(it.mat);
  if (ds.labeled()) {
    d.labels.reserve(ds.size());
    for (const auto& it : ds.items) d.labels.push_back(*it.label);
  }
  return d;
}

Dataset Dictionary::ToDataset() const {
  Dataset ds;
  ds.dim = dim();
  for (Eigen::Index i = 0; i < size(); ++i) {
    LabeledSpd it{atoms[static_cast<std::size_t>(i)], std::nullopt};
    if (labeled()) it.label = labels[static_cast<std::size_t>(i)];
    ds.items.push_back(std::move(it));
  }
  return ds;
}

double energy(const Dataset& data, const Dictionary& dict,
              const KernelSpec& spec, double lambda,
              const std::vector<SparseCode>& codes) {
  if (codes.size() != data.size()) {
    throw DimensionMismatch("energy: one code per sample required");
  }
  const GramCache cache = gram(dict.atoms, spec);
  double total = 0.0;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const Vector kxd = cross_gram(data.items[i].mat, dict.atoms, spec);
    total += objective(codes[i].y, cache.kdd, kxd, 1.0, lambda);
  }
  return total;
}

AtomUpdate update_atom_j(Eigen::Index r, const Dataset& data,
                         const std::vector<SparseCode>& codes,
                         const Dictionary& dict, const KernelSpec& spec) {
  const Eigen::Index n = dict.dim();
  const auto& d_r = dict.atoms[static_cast<std::size_t>(r)];
  Matrix p = Matrix::Zero(n, n);
  Matrix q = Matrix::Zero(n, n);

  // Kernel values against the previous D_r are scalars in the update.
  std::vector<double> k_atoms(dict.atoms.size());
  for (std::size_t j = 0; j < dict.atoms.size(); ++j) {
    k_atoms[j] = k_eval(dict.atoms[j], d_r, spec);
  }

  bool used = false;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const double y_ir = codes[i].y[r];
    if (y_ir == 0.0) continue;
    used = true;
    Matrix p_i = Matrix::Zero(n, n);
    Matrix q_i = Matrix::Zero(n, n);
    for (std::size_t j = 0; j < dict.atoms.size(); ++j) {
      const double y_ij = codes[i].y[static_cast<Eigen::Index>(j)];
      if (y_ij == 0.0) continue;
      p_i += y_ij * k_atoms[j] * dict.atoms[j].inverse();
      q_i += y_ij * k_atoms[j] * dict.atoms[j].mat();
    }
    const double kx = k_eval(data.items[i].mat, d_r, spec);
    p_i -= 2.0 * kx * data.items[i].mat.inverse();
    q_i -= 2.0 * kx * data.items[i].mat.mat();
    p += y_ir * p_i;
    q += y_ir * q_i;
  }
  if (!used) {
    throw AtomUnused("update_atom_j: atom " + std::to_string(r) +
                     " has no nonzero coefficient");
  }

  p = sym_part(p);
  q = sym_part(q);
  const bool p_pd = is_pd(p), q_pd = is_pd(q);
  const bool p_nd = is_pd(-p), q_nd = is_pd(-q);
  AtomUpdate out{d_r, false};
  if (p_pd && q_pd) {
    out.atom = riccati_solve(SpdMatrix::FromValidated(p),
                             SpdMatrix::FromValidated(q));
  } else if (p_nd && q_nd) {
    // The Riccati equation is invariant under joint negation of P and Q.
    out.atom = riccati_solve(SpdMatrix::FromValidated(-p),
                             SpdMatrix::FromValidated(-q));
  } else {
    out.atom = riccati_solve(nearest_spd(p_nd ? -p : p, clamp_eps(p)),
                             nearest_spd(q_nd ? -q : q, clamp_eps(q)));
    out.projected = true;
  }
  return out;
}

AtomUpdate update_atom_s(Eigen::Index r, const Dataset& data,
                         const std::vector<SparseCode>& codes,
                         const Dictionary& dict, const KernelSpec& spec) {
  const Eigen::Index n = dict.dim();
  const auto& d_r = dict.atoms[static_cast<std::size_t>(r)];
  const Matrix id = Matrix::Identity(n, n);

  std::vector<double> k_atoms(dict.atoms.size());
  std::vector<Matrix> sum_inv(dict.atoms.size());
  for (std::size_t j = 0; j < dict.atoms.size(); ++j) {
    k_atoms[j] = k_eval(dict.atoms[j], d_r, spec);
    sum_inv[j] =
        Eigen::LLT<Matrix>(dict.atoms[j].mat() + d_r.mat()).solve(id);
  }

  Matrix p = Matrix::Zero(n, n);
  double denom = 0.0;
  bool used = false;
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const double y_ir = codes[i].y[r];
    if (y_ir == 0.0) continue;
    used = true;
    const double kx = k_eval(data.items[i].mat, d_r, spec);
    const Matrix xi_dr_inv =
        Eigen::LLT<Matrix>(data.items[i].mat.mat() + d_r.mat()).solve(id);
    Matrix p_i = 2.0 * kx * xi_dr_inv;
    double c_i = 2.0 * kx;
    for (std::size_t j = 0; j < dict.atoms.size(); ++j) {
      const double y_ij = codes[i].y[static_cast<Eigen::Index>(j)];
      if (y_ij == 0.0) continue;
      p_i -= y_ij * k_atoms[j] * sum_inv[j];
      c_i -= y_ij * k_atoms[j];
    }
    p += y_ir * p_i;
    denom += y_ir * c_i;
  }
  if (!used) {
    throw AtomUnused("update_atom_s: atom " + std::to_string(r) +
                     " has no nonzero coefficient");
  }
  if (std::abs(denom) < 1e-12) {
    throw DegenerateDenominator("update_atom_s: stationarity denominator " +
                                std::to_string(denom));
  }

  // Stationarity gives D_r^{-1} = (2/denom) P, i.e. D_r = (denom/2) P^{-1}.
  p = sym_part(p);
  const Matrix candidate =
      0.5 * denom * p.fullPivLu().solve(Matrix::Identity(n, n));
  AtomUpdate out{d_r, false};
  if (is_pd(candidate)) {
    out.atom = SpdMatrix::FromValidated(candidate);
  } else {
    out.atom = nearest_spd(candidate, clamp_eps(candidate));
    out.projected = true;
  }
  return out;
}

Dictionary kmeans_init(const Dataset& data, Eigen::Index n_atoms,
                       std::uint64_t seed, int max_iters) {
  if (n_atoms < 1 || static_cast<std::size_t>(n_atoms) > data.size()) {
    throw std::invalid_argument("kmeans_init: need 1 <= N <= sample count");
  }
  const std::size_t m = data.size();
  std::vector<Eigen::Index> seeds = draw_distinct(m, n_atoms, seed);
  std::vector<SpdMatrix> centroids;
  centroids.reserve(static_cast<std::size_t>(n_atoms));
  for (Eigen::Index s : seeds) {
    centroids.push_back(data.items[static_cast<std::size_t>(s)].mat);
  }

  std::vector<int> assign(m, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<int> next(m);
    std::vector<double> dists(m);
    for (std::size_t i = 0; i < m; ++i) {
      int best = 0;
      double best_d = airm_dist(data.items[i].mat, centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c) {
        const double d = airm_dist(data.items[i].mat, centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      next[i] = best;
      dists[i] = best_d;
    }
    // Re-seed empty clusters from the farthest sample.
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (std::count(next.begin(), next.end(), static_cast<int>(c)) > 0) {
        continue;
      }
      const std::size_t far = static_cast<std::size_t>(std::distance(
          dists.begin(), std::max_element(dists.begin(), dists.end())));
      next[far] = static_cast<int>(c);
      dists[far] = 0.0;
    }
    const bool stable = (next == assign);
    assign = std::move(next);
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      std::vector<SpdMatrix> members;
      for (std::size_t i = 0; i < m; ++i) {
        if (assign[i] == static_cast<int>(c)) members.push_back(data.items[i].mat);
      }
      centroids[c] = karcher_mean(members).mean;
    }
    if (stable) break;
  }

  Dictionary dict;
  dict.atoms = std::move(centroids);
  return dict;
}

std::pair<Dictionary, LearnTrace> learn(const Dataset& data,
                                        const LearnConfig& cfg) {
  if (data.items.empty()) {
    throw std::invalid_argument("learn: empty dataset");
  }
  if (cfg.n_atoms < 1 || cfg.iters < 1) {
    throw std::invalid_argument("learn: n_atoms and iters must be >= 1");
  }
  validate_beta(cfg.kernel);

  Dictionary dict;
  if (cfg.init == InitMethod::IntrinsicKmeans) {
    dict = kmeans_init(data, cfg.n_atoms, cfg.seed);
  } else {
    if (static_cast<std::size_t>(cfg.n_atoms) > data.size()) {
      throw std::invalid_argument(
          "learn: random_subset init needs N <= sample count");
    }
    for (Eigen::Index s : draw_distinct(data.size(), cfg.n_atoms, cfg.seed)) {
      dict.atoms.push_back(data.items[static_cast<std::size_t>(s)].mat);
    }
  }

  SolverConfig solver = cfg.solver;
  solver.lambda = cfg.lambda;

  LearnTrace trace;
  std::vector<SparseCode> codes = code_all(data, dict, cfg.kernel, solver);
  trace.initial_energy = energy(data, dict, cfg.kernel, cfg.lambda, codes);

  for (int t = 0; t < cfg.iters; ++t) {
    int projections = 0;
    int unused = 0;
    for (Eigen::Index r = 0; r < dict.size(); ++r) {
      try {
        AtomUpdate upd =
            cfg.kernel.kind == KernelKind::Jeffrey
                ? update_atom_j(r, data, codes, dict, cfg.kernel)
                : update_atom_s(r, data, codes, dict, cfg.kernel);
        dict.atoms[static_cast<std::size_t>(r)] = std::move(upd.atom);
        if (upd.projected) ++projections;
      } catch (const AtomUnused&) {
        ++unused;
      } catch (const DegenerateDenominator&) {
        ++unused;
      }
    }
    codes = code_all(data, dict, cfg.kernel, solver);
    trace.energies.push_back(energy(data, dict, cfg.kernel, cfg.lambda, codes));
    trace.projections.push_back(projections);
    trace.unused_atoms.push_back(unused);
  }
  trace.improved = trace.energies.back() < trace.initial_energy;
  return {std::move(dict), std::move(trace)};
}

std::string classify(const SpdMatrix& x, const Dictionary& dict,
                     const KernelSpec& spec, const SolverConfig& cfg) {
  if (!dict.labeled()) {
    throw UnknownLabel("classify: dictionary is not labeled");
  }
  const GramCache cache = gram(dict.atoms, spec);
  const Vector kxd = cross_gram(x, dict.atoms, spec);
  const SparseCode code = kfss(cache, kxd, 1.0, cfg);
  const std::vector<std::string> classes = dict.classes();
  const std::vector<double> errors =
      residual_errors(code.y, dict.labels, classes, cache.kdd, kxd);
  const std::size_t best = static_cast<std::size_t>(std::distance(
      errors.begin(), std::min_element(errors.begin(), errors.end())));
  return classes[best];
}

}  // namespace spdsc
