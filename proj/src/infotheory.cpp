#include "causnet/infotheory.hpp"

#include <cmath>
#include <string>

#include "causnet/linalg.hpp"

namespace causnet {

namespace {

constexpr double kNumericalFloor = 1e-10;

double clamp_nonnegative(double value, const char* what) {
  if (value >= 0.0) return value;
  if (value >= -kNumericalFloor) return 0.0;
  throw numerical_integrity_error(
      std::string(what) + ": value " + std::to_string(value) +
          " is materially negative for a quantity that cannot be",
      value);
}

void require_groups(const Eigen::MatrixXd& j, const std::vector<int>& idx1,
                    const std::vector<int>& idx2, const char* what) {
  const int n = static_cast<int>(j.rows());
  if (idx1.empty()) throw invalid_argument_error(std::string(what) + ": empty idx1");
  for (int v : idx1)
    if (v < 0 || v >= n)
      throw invalid_argument_error(std::string(what) + ": idx1 out of range");
  for (int v : idx2)
    if (v < 0 || v >= n)
      throw invalid_argument_error(std::string(what) + ": idx2 out of range");
  for (int a : idx1)
    for (int b : idx2)
      if (a == b)
        throw invalid_argument_error(std::string(what) +
                                     ": index groups must be disjoint");
}

std::vector<int> lag_columns(const PrecisionMatrix& jm, int variable, int tau) {
  std::vector<int> cols;
  cols.reserve(tau);
  for (int l = 1; l <= tau; ++l) cols.push_back(jm.col(variable, l));
  return cols;
}

}  // namespace

const char* te_mode_name(TEMode mode) {
  return mode == TEMode::conditional ? "conditional" : "unconditional";
}

double gaussian_entropy(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols())
    throw invalid_argument_error("gaussian_entropy: matrix must be square");
  const double n = static_cast<double>(sigma.rows());
  return 0.5 * logdet_spd(sigma, "gaussian_entropy") +
         0.5 * n * std::log(2.0 * M_PI * M_E);
}

Eigen::MatrixXd cond_cov_given_rest(const Eigen::MatrixXd& j,
                                    const std::vector<int>& idx) {
  if (idx.empty())
    throw invalid_argument_error("cond_cov_given_rest: empty index group");
  return inverse_spd(submatrix(j, idx), "cond_cov_given_rest");
}

Eigen::MatrixXd cond_cov_given_rest(const PrecisionMatrix& jm,
                                    const std::vector<int>& idx) {
  return cond_cov_given_rest(jm.J, idx);
}

Eigen::MatrixXd cond_cov_partial(const Eigen::MatrixXd& j,
                                 const std::vector<int>& idx1,
                                 const std::vector<int>& idx2) {
  require_groups(j, idx1, idx2, "cond_cov_partial");
  if (idx2.empty()) return cond_cov_given_rest(j, idx1);
  Eigen::MatrixXd j11 = submatrix(j, idx1);
  Eigen::MatrixXd j12 = submatrix(j, idx1, idx2);
  Eigen::MatrixXd j22 = submatrix(j, idx2);
  Eigen::LLT<Eigen::MatrixXd> llt(j22);
  if (llt.info() != Eigen::Success)
    throw not_positive_definite_error("cond_cov_partial: singular J22 block");
  Eigen::MatrixXd schur = j11 - j12 * llt.solve(j12.transpose());
  return inverse_spd(schur, "cond_cov_partial");
}

Eigen::MatrixXd cond_cov_partial(const PrecisionMatrix& jm,
                                 const std::vector<int>& idx1,
                                 const std::vector<int>& idx2) {
  return cond_cov_partial(jm.J, idx1, idx2);
}

double conditional_mutual_information(const Eigen::MatrixXd& j,
                                      const std::vector<int>& idx1,
                                      const std::vector<int>& idx2) {
  require_groups(j, idx1, idx2, "conditional_mutual_information");
  if (idx2.empty()) return 0.0;
  Eigen::MatrixXd j11 = submatrix(j, idx1);
  Eigen::MatrixXd j12 = submatrix(j, idx1, idx2);
  if (j12.isZero(0.0)) return 0.0;  // exact conditional independence
  Eigen::MatrixXd j22 = submatrix(j, idx2);
  Eigen::LLT<Eigen::MatrixXd> llt(j22);
  if (llt.info() != Eigen::Success)
    throw not_positive_definite_error(
        "conditional_mutual_information: singular J22 block");
  Eigen::MatrixXd schur = j11 - j12 * llt.solve(j12.transpose());
  double value = 0.5 * logdet_spd(j11, "conditional_mutual_information (J11)") -
                 0.5 * logdet_spd(schur, "conditional_mutual_information (Schur)");
  return clamp_nonnegative(value, "conditional_mutual_information");
}

double conditional_mutual_information(const PrecisionMatrix& jm,
                                      const std::vector<int>& idx1,
                                      const std::vector<int>& idx2) {
  return conditional_mutual_information(jm.J, idx1, idx2);
}

double conditional_transfer_entropy(const PrecisionMatrix& jm, int i, int j,
                                    int tau) {
  if (jm.p <= 0 || jm.tau <= 0)
    throw invalid_argument_error(
        "conditional_transfer_entropy: precision matrix has no column map");
  if (tau != jm.tau)
    throw invalid_argument_error(
        "conditional_transfer_entropy: tau does not match the lagged frame");
  if (i == j || i < 0 || j < 0 || i >= jm.p || j >= jm.p)
    throw invalid_argument_error("conditional_transfer_entropy: bad pair");
  std::vector<int> idx1{jm.col(j, 0)};
  std::vector<int> idx2 = lag_columns(jm, i, tau);
  return conditional_mutual_information(jm.J, idx1, idx2);
}

double unconditional_transfer_entropy(const CovarianceModel& model,
                                      const UnconditionalConfig& config, int i,
                                      int j, int tau) {
  if (model.p <= 0 || model.tau <= 0)
    throw invalid_argument_error(
        "unconditional_transfer_entropy: covariance has no column map");
  if (tau != model.tau)
    throw invalid_argument_error(
        "unconditional_transfer_entropy: tau does not match the lagged frame");
  if (i == j || i < 0 || j < 0 || i >= model.p || j >= model.p)
    throw invalid_argument_error("unconditional_transfer_entropy: bad pair");

  // Local column order: target at 0, source lags 1..tau, target lags tau+1..2tau.
  // In the frame layout, col(v, lag) = lag*p + v, so col(j, 0) is simply j.
  std::vector<int> cols;
  cols.reserve(2 * tau + 1);
  cols.push_back(j);
  for (int l = 1; l <= tau; ++l) cols.push_back(l * model.p + i);
  for (int l = 1; l <= tau; ++l) cols.push_back(l * model.p + j);

  Eigen::MatrixXd j_local;
  if (config.variant == UnconditionalVariant::local_reestimate) {
    CovarianceModel local = make_covariance_model(
        submatrix(model.S, cols), model.q, model.standardized);
    j_local = estimate_precision(local, config.method, config.gamma,
                                 config.options).J;
  } else {
    PrecisionMatrix global =
        estimate_precision(model, config.method, config.gamma, config.options);
    Eigen::MatrixXd w = inverse_spd(global.J, "unconditional_transfer_entropy");
    j_local = inverse_spd(submatrix(w, cols), "unconditional_transfer_entropy");
  }

  std::vector<int> idx1{0};
  std::vector<int> idx2(tau);
  for (int l = 0; l < tau; ++l) idx2[l] = 1 + l;
  return conditional_mutual_information(j_local, idx1, idx2);
}

double unconditional_transfer_entropy(const LaggedPanel& panel,
                                      const UnconditionalConfig& config, int i,
                                      int j, int tau) {
  return unconditional_transfer_entropy(covariance(panel, config.standardize),
                                        config, i, j, tau);
}

TEMatrix te_matrix(const PrecisionMatrix& jm) {
  if (jm.p <= 0 || jm.tau <= 0)
    throw invalid_argument_error("te_matrix: precision matrix has no column map");
  TEMatrix out;
  out.mode = TEMode::conditional;
  out.method = jm.method;
  out.gamma = jm.gamma;
  out.T = Eigen::MatrixXd::Zero(jm.p, jm.p);
  for (int i = 0; i < jm.p; ++i)
    for (int j = 0; j < jm.p; ++j) {
      if (i == j) continue;
      try {
        out.T(i, j) = conditional_transfer_entropy(jm, i, j, jm.tau);
      } catch (const causnet_error& e) {
        throw causnet_error("te_matrix: pair (" + std::to_string(i) + "->" +
                            std::to_string(j) + ") failed: " + e.what());
      }
    }
  return out;
}

TEMatrix te_matrix(const LaggedPanel& panel, const UnconditionalConfig& config) {
  CovarianceModel model = covariance(panel, config.standardize);
  const int p = model.p, tau = model.tau;
  TEMatrix out;
  out.mode = TEMode::unconditional;
  out.method = config.method;
  out.gamma = config.gamma;
  out.T = Eigen::MatrixXd::Zero(p, p);

  // For the global-marginal variant the expensive global estimate is shared
  // across all pairs.
  Eigen::MatrixXd w_global;
  UnconditionalConfig per_pair = config;
  if (config.variant == UnconditionalVariant::global_restrict) {
    PrecisionMatrix global =
        estimate_precision(model, config.method, config.gamma, config.options);
    w_global = inverse_spd(global.J, "te_matrix (global marginal)");
  }

  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      try {
        if (config.variant == UnconditionalVariant::local_reestimate) {
          out.T(i, j) = unconditional_transfer_entropy(model, per_pair, i, j, tau);
        } else {
          std::vector<int> cols;
          cols.push_back(j);
          for (int l = 1; l <= tau; ++l) cols.push_back(l * p + i);
          for (int l = 1; l <= tau; ++l) cols.push_back(l * p + j);
          Eigen::MatrixXd j_local =
              inverse_spd(submatrix(w_global, cols), "te_matrix (local inverse)");
          std::vector<int> idx1{0};
          std::vector<int> idx2(tau);
          for (int l = 0; l < tau; ++l) idx2[l] = 1 + l;
          out.T(i, j) = conditional_mutual_information(j_local, idx1, idx2);
        }
      } catch (const causnet_error& e) {
        throw causnet_error("te_matrix: pair (" + std::to_string(i) + "->" +
                            std::to_string(j) + ") failed: " + e.what());
      }
    }
  return out;
}

}  // namespace causnet
