#include "spdsc/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spdsc {

namespace {

constexpr double kOptTol = 1e-9;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

void check_lengths(const Vector& y, const Matrix& kdd, const Vector& kxd) {
  if (kdd.rows() != kdd.cols() || kdd.rows() != kxd.size() ||
      y.size() != kxd.size()) {
    throw DimensionMismatch("sparse_coding: inconsistent lengths");
  }
}

}  // namespace

double objective(const Vector& y, const Matrix& kdd, const Vector& kxd,
                 double kxx, double lambda) {
  check_lengths(y, kdd, kxd);
  return kxx - 2.0 * y.dot(kxd) + y.dot(kdd * y) +
         lambda * y.lpNorm<1>();
}

double grad_coeff(const Vector& y, const Matrix& kdd, const Vector& kxd,
                  Eigen::Index j) {
  check_lengths(y, kdd, kxd);
  if (j < 0 || j >= y.size()) {
    throw IndexOutOfRange("grad_coeff: index out of range");
  }
  return 2.0 * (kdd.col(j).dot(y) - kxd[j]);
}

Vector active_qp_solve(const Matrix& kdd_hat, const Vector& kxd_hat,
                       const Vector& theta_hat, double lambda) {
  const Vector rhs = kxd_hat - 0.5 * lambda * theta_hat;
  Eigen::LLT<Matrix> llt(kdd_hat);
  if (llt.info() == Eigen::Success) {
    return llt.solve(rhs);
  }
  Matrix jittered = kdd_hat;
  jittered.diagonal().array() += 1e-10;
  Eigen::LLT<Matrix> retry(jittered);
  if (retry.info() == Eigen::Success) {
    return retry.solve(rhs);
  }
  throw SingularActiveSet("active_qp_solve: active submatrix is singular");
}

SparseCode kfss(const Matrix& kdd, const Vector& kxd, double kxx,
                const SolverConfig& cfg) {
  const Eigen::Index n = kxd.size();
  if (kdd.rows() != n || kdd.cols() != n) {
    throw DimensionMismatch("kfss: Gram size does not match kernel vector");
  }
  const double lambda = cfg.lambda;

  SparseCode code;
  code.y = Vector::Zero(n);
  std::vector<Eigen::Index> active;
  Vector theta = Vector::Zero(n);

  auto grad = [&](Eigen::Index j) {
    return 2.0 * (kdd.col(j).dot(code.y) - kxd[j]);
  };

  // True objective, used for the descent trace.
  auto full_objective = [&] {
    return objective(code.y, kdd, kxd, kxx, lambda);
  };

  auto condition_a_holds = [&] {
    for (Eigen::Index i : active) {
      if (std::abs(grad(i) + lambda * sign_of(code.y[i])) > kOptTol) {
        return false;
      }
    }
    return true;
  };

  while (true) {
    // Step 1-2: feature selection among the zero coefficients.
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (code.y[j] != 0.0) continue;
      const double g = std::abs(grad(j));
      if (g > best_abs) {
        best_abs = g;
        best = j;
      }
    }
    if (best >= 0 && best_abs > lambda + 1e-12) {
      theta[best] = -static_cast<double>(sign_of(grad(best)));
      active.push_back(best);
      std::sort(active.begin(), active.end());
    } else if (active.empty()) {
      break;  // y = 0 is optimal
    } else if (condition_a_holds()) {
      break;  // both optimality conditions satisfied
    }

    // Step 3: feature-sign steps until the nonzero coefficients are
    // consistent (optimality condition (a)).
    bool truncated = false;
    do {
      const Eigen::Index m = static_cast<Eigen::Index>(active.size());
      Matrix kdd_hat(m, m);
      Vector kxd_hat(m), theta_hat(m), y_hat(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        kxd_hat[a] = kxd[active[a]];
        theta_hat[a] = theta[active[a]];
        y_hat[a] = code.y[active[a]];
        for (Eigen::Index b = 0; b < m; ++b) {
          kdd_hat(a, b) = kdd(active[a], active[b]);
        }
      }
      const Vector y_new = active_qp_solve(kdd_hat, kxd_hat, theta_hat, lambda);

      bool consistent = true;
      for (Eigen::Index a = 0; a < m; ++a) {
        if (sign_of(y_new[a]) != sign_of(theta_hat[a])) {
          consistent = false;
          break;
        }
      }

      Vector y_next = y_new;
      if (!consistent) {
        // Discrete line search over the zero crossings on the segment from
        // the current point to the QP solution.  Candidates are compared on
        // the true objective restricted to the active set; the fixed-sign
        // surrogate underestimates it for points past a sign flip and can
        // send the iterate to an inconsistent far-away QP solution.
        auto f_active = [&](const Vector& z) {
          return kxx - 2.0 * z.dot(kxd_hat) + z.dot(kdd_hat * z) +
                 lambda * z.lpNorm<1>();
        };
        const Vector dir = y_new - y_hat;
        double best_val = f_active(y_new);
        for (Eigen::Index a = 0; a < m; ++a) {
          if (sign_of(y_hat[a]) == sign_of(y_new[a])) continue;
          if (dir[a] == 0.0) continue;
          const double t = y_hat[a] / (y_hat[a] - y_new[a]);
          if (t <= 0.0 || t >= 1.0) continue;
          Vector z = y_hat + t * dir;
          z[a] = 0.0;  // exact crossing
          const double v = f_active(z);
          if (v < best_val) {
            best_val = v;
            y_next = z;
          }
        }
      }

      for (Eigen::Index a = 0; a < m; ++a) {
        code.y[active[a]] = y_next[a];
      }
      // Prune coefficients that reached zero, refresh the sign vector.
      std::vector<Eigen::Index> still;
      for (Eigen::Index i : active) {
        if (std::abs(code.y[i]) <= cfg.zero_tol) {
          code.y[i] = 0.0;
          theta[i] = 0.0;
        } else {
          theta[i] = static_cast<double>(sign_of(code.y[i]));
          still.push_back(i);
        }
      }
      active = std::move(still);

      ++code.iterations;
      code.trace.push_back(full_objective());
      if (code.iterations >= cfg.max_steps) {
        truncated = true;
        break;
      }
    } while (!active.empty() && !condition_a_holds());

    if (truncated) {
      code.truncated = true;
      break;
    }
    // Step 4: condition (a) holds here; the outer loop re-checks condition
    // (b) via feature selection and terminates when no feature activates.
  }

  code.objective = full_objective();
  return code;
}

Vector oracle_solve(const Matrix& kdd, const Vector& kxd, double kxx,
                    double lambda) {
  const Eigen::Index n = kxd.size();
  if (n > 12) {
    throw TooLarge("oracle_solve: enumeration bound is N <= 12");
  }
  Vector best = Vector::Zero(n);
  double best_obj = objective(best, kdd, kxd, kxx, lambda);

  std::vector<int> pattern(static_cast<std::size_t>(n), 0);
  const long total = static_cast<long>(std::pow(3.0, static_cast<double>(n)));
  for (long code = 1; code < total; ++code) {
    long c = code;
    for (Eigen::Index i = 0; i < n; ++i) {
      pattern[static_cast<std::size_t>(i)] = static_cast<int>(c % 3) - 1;
      c /= 3;
    }
    std::vector<Eigen::Index> act;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pattern[static_cast<std::size_t>(i)] != 0) act.push_back(i);
    }
    const Eigen::Index m = static_cast<Eigen::Index>(act.size());
    Matrix kdd_hat(m, m);
    Vector kxd_hat(m), s_hat(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      kxd_hat[a] = kxd[act[a]];
      s_hat[a] = pattern[static_cast<std::size_t>(act[a])];
      for (Eigen::Index b = 0; b < m; ++b) {
        kdd_hat(a, b) = kdd(act[a], act[b]);
      }
    }
    Vector y_hat;
    try {
      y_hat = active_qp_solve(kdd_hat, kxd_hat, s_hat, lambda);
    } catch (const SingularActiveSet&) {
      continue;
    }
    bool consistent = true;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (sign_of(y_hat[a]) != sign_of(s_hat[a])) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    Vector y = Vector::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) y[act[a]] = y_hat[a];
    const double obj = objective(y, kdd, kxd, kxx, lambda);
    if (obj < best_obj) {
      best_obj = obj;
      best = y;
    }
  }
  return best;
}

std::vector<double> residual_errors(const Vector& y,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& classes,
                                    const Matrix& kdd, const Vector& kxd) {
  if (static_cast<Eigen::Index>(labels.size()) != y.size()) {
    throw DimensionMismatch("residual_errors: one label per atom required");
  }
  std::vector<double> errors;
  errors.reserve(classes.size());
  for (const auto& lbl : labels) {
    if (std::find(classes.begin(), classes.end(), lbl) == classes.end()) {
      throw UnknownLabel("residual_errors: unknown atom label " + lbl);
    }
  }
  for (const auto& cls : classes) {
    Vector yc = Vector::Zero(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == cls) yc[i] = y[i];
    }
    errors.push_back(-2.0 * yc.dot(kxd) + yc.dot(kdd * yc));
  }
  return errors;
}

}  // namespace spdsc
