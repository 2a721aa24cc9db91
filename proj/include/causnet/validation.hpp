#pragma once

#include <Eigen/Dense>

#include "causnet/errors.hpp"
#include "causnet/estimators.hpp"
#include "causnet/infotheory.hpp"
#include "causnet/simulator.hpp"

namespace causnet {

// How the degrees of freedom of the likelihood-ratio statistic are counted.
// scalar_pair covers the standard case of one source and one target variable
// (d = tau); block generalizes to vector-valued groups (d = tau * rows * cols).
enum class DofRule { scalar_pair, block };

struct ValidationParams {
  double p_v = 0.01;   // per-link p-value threshold, in (0, 1]
  double r = 2.0;      // likelihood-ratio scale factor, > 0
  bool bonferroni = false;
  DofRule d_rule = DofRule::scalar_pair;
  int block_rows = 1;  // target block dimension (block rule only)
  int block_cols = 1;  // source block dimension (block rule only)
};

struct ConfusionCounts {
  long long TP = 0;
  long long FP = 0;
  long long FN = 0;
  long long TN = 0;

  long long n() const { return TP + FP; }  // retrieved links
  long long K() const { return TP + FN; }  // true links
  long long m() const { return FP + TN; }  // true non-links
  long long total() const { return TP + FP + FN + TN; }
};

// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x),
// computed by series expansion for x < a + 1 and by continued fraction
// otherwise so both tails keep full relative precision.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Chi-square CDF with d degrees of freedom: P(d/2, x/2).
// Throws invalid_argument_error on x < 0 or d < 1.
double chi2_cdf(double x, int d);

// Upper tail 1 - chi2_cdf(x, d), evaluated directly so tiny tail
// probabilities are not lost to cancellation.
double chi2_survival(double x, int d);

// P-value of a transfer-entropy value under the likelihood-ratio test:
// 1 - chi2_cdf(r * q * T, d) with d given by the degrees-of-freedom rule.
double te_pvalue(double T, int q, int tau, const ValidationParams& params);

// Per-comparison threshold for family-wise control over the p^2 - p
// ordered pairs: p_v / (p^2 - p).
double bonferroni_threshold(double p_v, int p);

// Network of pairs (i -> j) whose precision matrix couples some lagged
// column of i (lag >= 1) to the contemporaneous column of j. Entries with
// magnitude <= 1e-10 count as zero, matching the estimator support rule.
CausalityNetwork inference_network(const PrecisionMatrix& jm);

// Network of pairs whose transfer entropy passes the likelihood-ratio test
// at the configured threshold (Bonferroni-adjusted when flagged).
CausalityNetwork validated_network(const TEMatrix& te, int q, int tau,
                                   const ValidationParams& params);

// Exact confusion counts of a retrieved network against the ground truth,
// over the p^2 - p ordered pairs (diagonal excluded).
ConfusionCounts confusion(const CausalityNetwork& retrieved,
                          const CausalityNetwork& truth);

// Upper-tail hypergeometric probability P(X >= TP) of retrieving at least
// TP of the K true links when drawing n links out of the p^2 - p possible
// ones. Computed in log-space; TP = 0 returns exactly 1.
double hypergeometric_pvalue(long long TP, long long n, long long K, int p);

}  // namespace causnet
