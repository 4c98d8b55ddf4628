#pragma once

#include <string>
#include <vector>

#include "spdsc/kernels.hpp"

namespace spdsc {

struct IndexOutOfRange : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct SingularActiveSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TooLarge : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnknownLabel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
  double lambda = 0.1;
  int max_steps = 10000;
  double zero_tol = 1e-12;
};

struct SparseCode {
  Vector y;
  double objective = 0.0;
  int iterations = 0;
  bool truncated = false;  // max_steps hit; best-so-far returned
  std::vector<double> trace;  // objective after each feature-sign step
};

/// kxx - 2 y'K(X,D) + y'K(D,D)y + lambda ||y||_1.
double objective(const Vector& y, const Matrix& kdd, const Vector& kxd,
                 double kxx, double lambda);

/// Partial derivative of the smooth part in coefficient j:
/// 2 (sum_q y_q k(D_q, D_j) - k(X, D_j)).
double grad_coeff(const Vector& y, const Matrix& kdd, const Vector& kxd,
                  Eigen::Index j);

/// Closed-form minimizer of the fixed-sign quadratic on the active set:
/// y = Khat^{-1} (kxd_hat - lambda * theta_hat / 2).
/// Adds a 1e-10 diagonal jitter and retries if the Cholesky fails.
Vector active_qp_solve(const Matrix& kdd_hat, const Vector& kxd_hat,
                       const Vector& theta_hat, double lambda);

/// Kernel feature-sign search for min_y kxx - 2y'kxd + y'Kdd y + lambda||y||_1.
SparseCode kfss(const Matrix& kdd, const Vector& kxd, double kxx,
                const SolverConfig& cfg);

inline SparseCode kfss(const GramCache& cache, const Vector& kxd, double kxx,
                       const SolverConfig& cfg) {
  return kfss(cache.kdd, kxd, kxx, cfg);
}

/// Global minimizer by enumerating all 3^N sign patterns (N <= 12).
/// Independent of the kfss search path; intended as a test oracle.
Vector oracle_solve(const Matrix& kdd, const Vector& kxd, double kxx,
                    double lambda);

/// Per-class residuals eps_i = -2 y_i'kxd + y_i'Kdd y_i, where y_i keeps
/// only the coefficients of class-i atoms.  Indexed by the sorted distinct
/// labels.
std::vector<double> residual_errors(const Vector& y,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& classes,
                                    const Matrix& kdd, const Vector& kxd);

}  // namespace spdsc
