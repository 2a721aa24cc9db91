#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "causnet/errors.hpp"
#include "causnet/simulator.hpp"
#include "causnet/tmfg.hpp"

namespace causnet {

// Sample covariance (or correlation) of a lagged panel, divisor q.
// p and tau are carried along so downstream consumers can map a matrix index
// back to (variable, lag).
struct CovarianceModel {
  Eigen::MatrixXd S;
  int q = 0;
  bool standardized = false;
  int p = 0;    // 0 when the model was not built from a lagged panel
  int tau = 0;

  int n() const { return static_cast<int>(S.rows()); }
};

enum class Method { ridge, glasso, logo };

const char* method_name(Method m);

// Estimated inverse covariance. For the sparse methods (glasso, logo) the
// off-diagonal support is explicit and entries outside it are exactly zero;
// ridge is dense and leaves `support` empty with dense_support = true.
struct PrecisionMatrix {
  Eigen::MatrixXd J;
  Method method = Method::ridge;
  double gamma = 0.0;
  bool dense_support = true;
  std::vector<std::pair<int, int>> support;  // sorted pairs i < j
  int p = 0;
  int tau = 0;

  int n() const { return static_cast<int>(J.rows()); }
  int col(int variable, int lag) const { return lag * p + variable; }
  bool in_support(int i, int j) const;
};

// Carries the last iterate when the graphical-lasso loop runs out of sweeps.
struct glasso_convergence_error : convergence_error {
  Eigen::MatrixXd last_iterate;
  glasso_convergence_error(const std::string& msg, double residual, int iters,
                           Eigen::MatrixXd iterate)
      : convergence_error(msg, residual, iters), last_iterate(std::move(iterate)) {}
};

// Mean-removed sample covariance with divisor q; standardize rescales to the
// correlation matrix (unit diagonal, exactly 1.0).
CovarianceModel covariance(const LaggedPanel& panel, bool standardize);

// Wraps an existing matrix as a CovarianceModel (used by tests and by the
// local re-estimation path of the unconditional measure).
CovarianceModel make_covariance_model(const Eigen::MatrixXd& s, int q,
                                      bool standardized, int p = 0, int tau = 0);

// J = ((1-gamma) S + gamma I)^{-1}. gamma in [0,1]; gamma = 0 requires an
// invertible S and throws near_singular_error otherwise.
PrecisionMatrix ridge_precision(const CovarianceModel& model, double gamma);

// l1-penalized maximum-likelihood precision via block coordinate descent over
// columns, diagonal penalized (so a fully sparse solution has
// J_ii = 1/(S_ii + gamma)). Stops when both the duality gap falls below
// tol * N and the working covariance stops moving by more than tol.
PrecisionMatrix glasso_precision(const CovarianceModel& model, double gamma,
                                 double tol = 1e-4, int max_iter = 200);

// Sparse precision restricted to a TMFG scaffold: sum of embedded local
// inverses of (1-gamma) S_cc + gamma I over the 4-cliques minus the same over
// the triangular separators. At gamma = 0 a local condition number above
// cond_cap raises near_singular_error.
PrecisionMatrix logo_precision(const CovarianceModel& model, double gamma,
                               double cond_cap = 1e12);

// Tuning knobs shared by every caller that dispatches on Method.
struct EstimatorOptions {
  double glasso_tol = 1e-4;
  int glasso_max_iter = 200;
  double logo_cond_cap = 1e12;
};

// Uniform entry point used by the sweep harness and the local re-estimation
// path of the unconditional transfer entropy.
PrecisionMatrix estimate_precision(const CovarianceModel& model, Method method,
                                   double gamma,
                                   const EstimatorOptions& options = {});

struct LikelihoodParts {
  double value;      // q/2 (log det J - tr(S J) - N log 2pi)
  double trace_sj;   // tr(S J)
  double logdet_j;
};

LikelihoodParts log_likelihood_parts(const PrecisionMatrix& jm,
                                     const CovarianceModel& model);
double log_likelihood(const PrecisionMatrix& jm, const CovarianceModel& model);

}  // namespace causnet
