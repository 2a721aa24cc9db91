#pragma once

#include <Eigen/Dense>
#include <vector>

#include "causnet/errors.hpp"
#include "causnet/estimators.hpp"
#include "causnet/simulator.hpp"

namespace causnet {

enum class TEMode { conditional, unconditional };

const char* te_mode_name(TEMode mode);

// p x p matrix of transfer entropies T(i -> j) in nats, diagonal fixed at 0.
struct TEMatrix {
  Eigen::MatrixXd T;
  TEMode mode = TEMode::conditional;
  Method method = Method::ridge;
  double gamma = 0.0;

  int p() const { return static_cast<int>(T.rows()); }
};

// Which joint model the unconditional measure is derived from: a fresh local
// estimate on the pair's 2*tau+1 columns (default), or the marginal of the
// global precision restricted to those columns.
enum class UnconditionalVariant { local_reestimate, global_restrict };

struct UnconditionalConfig {
  Method method = Method::ridge;
  double gamma = 0.1;
  UnconditionalVariant variant = UnconditionalVariant::local_reestimate;
  bool standardize = true;
  EstimatorOptions options;
};

// Differential entropy of N(mu, sigma) in nats: 1/2 log det Sigma + n/2 log(2 pi e).
double gaussian_entropy(const Eigen::MatrixXd& sigma);

// Covariance of the idx block conditioned on all remaining coordinates:
// (J_{idx,idx})^{-1}.
Eigen::MatrixXd cond_cov_given_rest(const Eigen::MatrixXd& j,
                                    const std::vector<int>& idx);
Eigen::MatrixXd cond_cov_given_rest(const PrecisionMatrix& jm,
                                    const std::vector<int>& idx);

// Covariance of idx1 conditioned on everything except idx2:
// (J11 - J12 J22^{-1} J21)^{-1}. An empty idx2 reduces to cond_cov_given_rest.
Eigen::MatrixXd cond_cov_partial(const Eigen::MatrixXd& j,
                                 const std::vector<int>& idx1,
                                 const std::vector<int>& idx2);
Eigen::MatrixXd cond_cov_partial(const PrecisionMatrix& jm,
                                 const std::vector<int>& idx1,
                                 const std::vector<int>& idx2);

// I(idx1; idx2 | everything else) in nats, from precision sub-blocks:
// -1/2 log det(J11 - J12 J22^{-1} J21) + 1/2 log det(J11). Non-negative up to
// a 1e-10 numerical floor; anything materially below zero raises.
double conditional_mutual_information(const Eigen::MatrixXd& j,
                                      const std::vector<int>& idx1,
                                      const std::vector<int>& idx2);
double conditional_mutual_information(const PrecisionMatrix& jm,
                                      const std::vector<int>& idx1,
                                      const std::vector<int>& idx2);

// Transfer entropy i -> j from a precision matrix over the full lagged frame:
// the conditional mutual information between {Z_j at lag 0} and {Z_i at lags
// 1..tau}, conditioned (through J) on every other frame column, which
// includes Z_j's own past. An exactly zero cross block returns exactly 0.
double conditional_transfer_entropy(const PrecisionMatrix& jm, int i, int j,
                                    int tau);

// Pairwise measure ignoring all other variables: restrict the frame to the
// 2*tau+1 columns {Z_j lag 0; Z_i lags 1..tau; Z_j lags 1..tau}, obtain a
// local precision per the config, and apply the same formula.
double unconditional_transfer_entropy(const CovarianceModel& model,
                                      const UnconditionalConfig& config, int i,
                                      int j, int tau);
double unconditional_transfer_entropy(const LaggedPanel& panel,
                                      const UnconditionalConfig& config, int i,
                                      int j, int tau);

// All ordered pairs i != j of the conditional measure.
TEMatrix te_matrix(const PrecisionMatrix& jm);

// All ordered pairs of the unconditional measure (covariance computed once).
TEMatrix te_matrix(const LaggedPanel& panel, const UnconditionalConfig& config);

}  // namespace causnet
