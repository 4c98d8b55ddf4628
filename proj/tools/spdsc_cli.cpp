#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdsc/dataset.hpp"
#include "spdsc/descriptors.hpp"
#include "spdsc/dict_learning.hpp"
#include "spdsc/divergences.hpp"
#include "spdsc/kernels.hpp"
#include "spdsc/sparse_coding.hpp"
#include "spdsc/synth.hpp"

namespace {

using nlohmann::json;
using namespace spdsc;

constexpr int kExitUsage = 2;
constexpr int kExitTruncated = 3;

KernelSpec make_spec(const std::string& kernel, double beta,
                     Eigen::Index dim) {
  KernelSpec spec;
  spec.kind = kernel == "j" ? KernelKind::Jeffrey : KernelKind::Stein;
  spec.beta = beta;
  spec.dim = dim;
  validate_beta(spec);
  return spec;
}

int worker_count() {
  if (const char* env = std::getenv("THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Parallel per-query sparse coding; output order matches input order.
std::vector<SparseCode> code_dataset(const Dataset& queries,
                                     const Dictionary& dict,
                                     const KernelSpec& spec,
                                     const SolverConfig& cfg) {
  const GramCache cache = gram(dict.atoms, spec);
  std::vector<SparseCode> codes(queries.size());
  const int workers =
      std::min<int>(worker_count(), static_cast<int>(queries.size()));
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < queries.size();
         i = next.fetch_add(1)) {
      const Vector kxd = cross_gram(queries.items[i].mat, dict.atoms, spec);
      codes[i] = kfss(cache, kxd, 1.0, cfg);
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < workers; ++t) threads.emplace_back(run);
    for (auto& t : threads) t.join();
  }
  return codes;
}

int cmd_gen(const SynthSpec& spec, const std::string& out) {
  save_dataset(gen_synth(spec), out);
  return 0;
}

int cmd_code(const std::string& dict_path, const std::string& input_path,
             const std::string& kernel, double beta, double lambda,
             const std::string& out, bool strict) {
  const Dataset dict_ds = load_dataset(dict_path);
  const Dataset input = load_dataset(input_path);
  if (input.items.empty()) {
    throw std::invalid_argument("input dataset is empty");
  }
  if (input.dim != dict_ds.dim) {
    throw DimensionMismatch("query dimension does not match dictionary");
  }
  const Dictionary dict = Dictionary::FromDataset(dict_ds);
  const KernelSpec spec = make_spec(kernel, beta, dict_ds.dim);
  SolverConfig cfg;
  cfg.lambda = lambda;
  const auto codes = code_dataset(input, dict, spec, cfg);

  json arr = json::array();
  bool truncated = false;
  for (const auto& code : codes) {
    json rec;
    rec["coefficients"] = std::vector<double>(
        code.y.data(), code.y.data() + code.y.size());
    rec["objective"] = code.objective;
    rec["iterations"] = code.iterations;
    rec["truncated"] = code.truncated;
    truncated = truncated || code.truncated;
    arr.push_back(std::move(rec));
  }
  std::ofstream os(out);
  os << arr.dump(2) << "\n";
  if (truncated) {
    std::cerr << "warning: solver truncated on at least one query\n";
    if (strict) return kExitTruncated;
  }
  return 0;
}

int cmd_learn(const std::string& train_path, Eigen::Index atoms,
              const std::string& kernel, double beta, double lambda,
              int iters, const std::string& init, std::uint64_t seed,
              const std::string& out) {
  const Dataset train = load_dataset(train_path);
  LearnConfig cfg;
  cfg.n_atoms = atoms;
  cfg.iters = iters;
  cfg.kernel = make_spec(kernel, beta, train.dim);
  cfg.lambda = lambda;
  cfg.init = init == "kmeans" ? InitMethod::IntrinsicKmeans
                              : InitMethod::RandomSubset;
  cfg.seed = seed;
  auto [dict, trace] = learn(train, cfg);
  save_dataset(dict.ToDataset(), out, "dictionary");

  json jt;
  jt["initial_energy"] = trace.initial_energy;
  jt["energies"] = trace.energies;
  jt["projections"] = trace.projections;
  jt["unused_atoms"] = trace.unused_atoms;
  jt["improved"] = trace.improved;
  std::ofstream os(out + ".trace.json");
  os << jt.dump(2) << "\n";
  return 0;
}

int cmd_classify(const std::string& dict_path, const std::string& query_path,
                 const std::string& kernel, double beta, double lambda,
                 const std::string& out) {
  const Dataset dict_ds = load_dataset(dict_path);
  if (!dict_ds.labeled()) {
    throw std::invalid_argument("classification requires a labeled dictionary");
  }
  const Dataset queries = load_dataset(query_path);
  if (queries.dim != dict_ds.dim) {
    throw DimensionMismatch("query dimension does not match dictionary");
  }
  const Dictionary dict = Dictionary::FromDataset(dict_ds);
  const KernelSpec spec = make_spec(kernel, beta, dict_ds.dim);
  SolverConfig cfg;
  cfg.lambda = lambda;

  const auto t0 = std::chrono::steady_clock::now();
  const auto codes = code_dataset(queries, dict, spec, cfg);
  const GramCache cache = gram(dict.atoms, spec);
  const std::vector<std::string> classes = dict.classes();

  std::map<std::string, int> class_index;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    class_index[classes[i]] = static_cast<int>(i);
  }
  const int c = static_cast<int>(classes.size());
  std::vector<std::vector<int>> confusion(c, std::vector<int>(c, 0));
  json residuals = json::array();
  int correct = 0, total = 0;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const Vector kxd = cross_gram(queries.items[i].mat, dict.atoms, spec);
    const auto errors =
        residual_errors(codes[i].y, dict.labels, classes, cache.kdd, kxd);
    const int pred = static_cast<int>(std::distance(
        errors.begin(), std::min_element(errors.begin(), errors.end())));
    json r;
    r["predicted"] = classes[static_cast<std::size_t>(pred)];
    r["residuals"] = errors;
    if (queries.items[i].label) {
      const auto it = class_index.find(*queries.items[i].label);
      if (it != class_index.end()) {
        confusion[static_cast<std::size_t>(it->second)]
                 [static_cast<std::size_t>(pred)]++;
        if (it->second == pred) ++correct;
        ++total;
      }
      r["label"] = *queries.items[i].label;
    }
    residuals.push_back(std::move(r));
  }
  const auto t1 = std::chrono::steady_clock::now();

  json report;
  report["schema"] = "report/1";
  report["classes"] = classes;
  report["confusion"] = confusion;
  report["accuracy"] =
      total > 0 ? static_cast<double>(correct) / total : 0.0;
  report["queries"] = residuals;
  report["timings_ms"]["classify"] =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  report["config"]["kernel"] = kernel;
  report["config"]["beta"] = beta;
  report["config"]["lambda"] = lambda;
  std::ofstream os(out);
  os << report.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::vector<int>& dims, const std::vector<int>& atom_counts,
              const std::string& kernel, int reps, const std::string& out) {
  if (reps < 1) {
    throw std::invalid_argument("reps must be >= 1");
  }
  std::ofstream os(out);
  os << "measure,n,N,kernel,mean_ms,std_ms\n";
  auto time_reps = [&](auto&& fn) {
    std::vector<double> ms;
    for (int rep = 0; rep < reps; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      fn();
      const auto t1 = std::chrono::steady_clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    double mean = 0.0;
    for (double v : ms) mean += v;
    mean /= static_cast<double>(ms.size());
    double var = 0.0;
    for (double v : ms) var += (v - mean) * (v - mean);
    const double stdev = std::sqrt(var / static_cast<double>(ms.size()));
    return std::pair<double, double>{mean, stdev};
  };

  for (int n : dims) {
    SynthSpec sspec;
    sspec.classes = 1;
    sspec.per_class = 2;
    sspec.dim = n;
    sspec.seed = 7;
    const Dataset pair = gen_synth(sspec);
    const SpdMatrix& x = pair.items[0].mat;
    const SpdMatrix& y = pair.items[1].mat;
    for (const char* k : {"j", "s"}) {
      if (kernel != "both" && kernel != k) continue;
      auto [mean, stdev] = time_reps([&] {
        volatile double v =
            std::string(k) == "j" ? j_div(x, y) : s_div(x, y);
        (void)v;
      });
      os << "divergence," << n << ",1," << k << "," << mean << "," << stdev
         << "\n";
    }
  }

  for (int count : atom_counts) {
    const int n = dims.empty() ? 10 : dims.front();
    SynthSpec sspec;
    sspec.classes = 1;
    sspec.per_class = count + 1;
    sspec.dim = n;
    sspec.seed = 11;
    const Dataset ds = gen_synth(sspec);
    std::vector<SpdMatrix> atoms;
    for (int i = 0; i < count; ++i) {
      atoms.push_back(ds.items[static_cast<std::size_t>(i)].mat);
    }
    const SpdMatrix& query = ds.items.back().mat;
    for (const char* k : {"j", "s"}) {
      if (kernel != "both" && kernel != k) continue;
      const KernelSpec spec = make_spec(k, 0.5, n);
      auto [mean, stdev] = time_reps([&] {
        volatile double v = cross_gram(query, atoms, spec).sum();
        (void)v;
      });
      os << "cross_gram," << n << "," << count << "," << k << "," << mean
         << "," << stdev << "\n";
    }
  }
  return 0;
}

int cmd_covdesc(const std::string& input, const std::string& mode,
                int block_h, int block_w, double eps,
                const std::string& out) {
  Dataset ds;
  if (mode == "skeleton") {
    const FrameSequence seq = load_frames_csv(input);
    const SpdMatrix desc = joint_covariance(seq, eps);
    ds.dim = desc.dim();
    ds.items.push_back({desc, std::nullopt});
  } else {
    const bool pgm = input.size() > 4 &&
                     input.compare(input.size() - 4, 4, ".pgm") == 0;
    const Matrix img = pgm ? load_pgm(input) : load_csv_grid(input);
    const FeatureGrid grid = texture_features(img);
    if (block_h <= 0 || block_w <= 0) {
      throw std::invalid_argument("texture mode requires --block H W");
    }
    ds.dim = 5;
    for (Eigen::Index r = 0; r + block_h <= grid.height; r += block_h) {
      for (Eigen::Index c = 0; c + block_w <= grid.width; c += block_w) {
        ds.items.push_back(
            {block_descriptor(grid, r, c, block_h, block_w, eps),
             std::nullopt});
      }
    }
  }
  ds.provenance = "covdesc:" + mode + ":" + input;
  save_dataset(ds, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse coding and dictionary learning for SPD matrices"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic SPD dataset");
  SynthSpec sspec;
  std::string gen_out;
  gen->add_option("--classes", sspec.classes);
  gen->add_option("--per-class", sspec.per_class);
  gen->add_option("--dim", sspec.dim);
  gen->add_option("--spread", sspec.spread);
  gen->add_option("--separation", sspec.separation);
  gen->add_option("--seed", sspec.seed);
  gen->add_option("--out", gen_out)->required();

  // code
  auto* code = app.add_subcommand("code", "Sparse-code a dataset");
  std::string code_dict, code_input, code_kernel = "s", code_out;
  double code_beta = 0.5, code_lambda = 0.1;
  bool strict = false;
  code->add_option("--dict", code_dict)->required();
  code->add_option("--input", code_input)->required();
  code->add_option("--kernel", code_kernel)
      ->check(CLI::IsMember({"j", "s"}));
  code->add_option("--beta", code_beta);
  code->add_option("--lambda", code_lambda);
  code->add_option("--out", code_out)->required();
  code->add_flag("--strict", strict,
                 "escalate solver truncation to exit code 3");

  // learn
  auto* lrn = app.add_subcommand("learn", "Learn a dictionary");
  std::string lrn_train, lrn_kernel = "s", lrn_init = "random", lrn_out;
  Eigen::Index lrn_atoms = 8;
  double lrn_beta = 0.5, lrn_lambda = 0.1;
  int lrn_iters = 10;
  std::uint64_t lrn_seed = 0;
  lrn->add_option("--train", lrn_train)->required();
  lrn->add_option("--atoms", lrn_atoms);
  lrn->add_option("--kernel", lrn_kernel)->check(CLI::IsMember({"j", "s"}));
  lrn->add_option("--beta", lrn_beta);
  lrn->add_option("--lambda", lrn_lambda);
  lrn->add_option("--iters", lrn_iters);
  lrn->add_option("--init", lrn_init)->check(CLI::IsMember({"random", "kmeans"}));
  lrn->add_option("--seed", lrn_seed);
  lrn->add_option("--out", lrn_out)->required();

  // classify
  auto* cls = app.add_subcommand("classify", "Residual-error classification");
  std::string cls_dict, cls_query, cls_kernel = "s", cls_out;
  double cls_beta = 0.5, cls_lambda = 0.1;
  cls->add_option("--dict", cls_dict)->required();
  cls->add_option("--query", cls_query)->required();
  cls->add_option("--kernel", cls_kernel)->check(CLI::IsMember({"j", "s"}));
  cls->add_option("--beta", cls_beta);
  cls->add_option("--lambda", cls_lambda);
  cls->add_option("--out", cls_out)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "Time divergences and cross-Gram");
  std::vector<int> bench_dims{10};
  std::vector<int> bench_atoms{50, 100, 200, 400, 800};
  std::string bench_kernel = "both", bench_out = "bench.csv";
  int bench_reps = 5;
  bench->add_option("--dims", bench_dims);
  bench->add_option("--atoms", bench_atoms);
  bench->add_option("--kernel", bench_kernel)
      ->check(CLI::IsMember({"j", "s", "both"}));
  bench->add_option("--reps", bench_reps);
  bench->add_option("--out", bench_out);

  // covdesc
  auto* cov = app.add_subcommand("covdesc", "Region covariance descriptors");
  std::string cov_input, cov_mode = "texture", cov_out;
  std::vector<int> cov_block{32, 32};
  double cov_eps = 1e-6;
  cov->add_option("--input", cov_input)->required();
  cov->add_option("--mode", cov_mode)
      ->check(CLI::IsMember({"texture", "skeleton"}));
  cov->add_option("--block", cov_block)->expected(2);
  cov->add_option("--eps", cov_eps);
  cov->add_option("--out", cov_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(sspec, gen_out);
    if (code->parsed()) {
      return cmd_code(code_dict, code_input, code_kernel, code_beta,
                      code_lambda, code_out, strict);
    }
    if (lrn->parsed()) {
      return cmd_learn(lrn_train, lrn_atoms, lrn_kernel, lrn_beta, lrn_lambda,
                       lrn_iters, lrn_init, lrn_seed, lrn_out);
    }
    if (cls->parsed()) {
      return cmd_classify(cls_dict, cls_query, cls_kernel, cls_beta,
                          cls_lambda, cls_out);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_dims, bench_atoms, bench_kernel, bench_reps,
                       bench_out);
    }
    if (cov->parsed()) {
      return cmd_covdesc(cov_input, cov_mode, cov_block[0], cov_block[1],
                         cov_eps, cov_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
