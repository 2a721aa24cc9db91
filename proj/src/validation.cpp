#include "causnet/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace causnet {

namespace {

// Series expansion of P(a, x), accurate for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 1000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x), accurate for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

int degrees_of_freedom(int tau, const ValidationParams& params) {
  if (params.d_rule == DofRule::scalar_pair) return tau;
  if (params.block_rows < 1 || params.block_cols < 1)
    throw invalid_argument_error("te_pvalue: block dimensions must be >= 1");
  return tau * params.block_rows * params.block_cols;
}

void check_params(const ValidationParams& params) {
  if (!(params.p_v > 0.0 && params.p_v <= 1.0))
    throw invalid_argument_error("validation: p_v must lie in (0, 1]");
  if (!(params.r > 0.0))
    throw invalid_argument_error("validation: r must be positive");
}

double log_choose(long long n, long long k) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw invalid_argument_error("regularized_gamma_p: a must be > 0");
  if (x < 0.0) throw invalid_argument_error("regularized_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw invalid_argument_error("regularized_gamma_q: a must be > 0");
  if (x < 0.0) throw invalid_argument_error("regularized_gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi2_cdf(double x, int d) {
  if (d < 1) throw invalid_argument_error("chi2_cdf: d must be >= 1");
  if (x < 0.0) throw invalid_argument_error("chi2_cdf: x must be >= 0");
  return regularized_gamma_p(0.5 * d, 0.5 * x);
}

double chi2_survival(double x, int d) {
  if (d < 1) throw invalid_argument_error("chi2_survival: d must be >= 1");
  if (x < 0.0) throw invalid_argument_error("chi2_survival: x must be >= 0");
  return regularized_gamma_q(0.5 * d, 0.5 * x);
}

double te_pvalue(double T, int q, int tau, const ValidationParams& params) {
  if (!(T >= 0.0)) throw invalid_argument_error("te_pvalue: T must be >= 0");
  if (q < 1) throw invalid_argument_error("te_pvalue: q must be >= 1");
  if (tau < 1) throw invalid_argument_error("te_pvalue: tau must be >= 1");
  if (!(params.r > 0.0))
    throw invalid_argument_error("te_pvalue: r must be positive");
  const int d = degrees_of_freedom(tau, params);
  return chi2_survival(params.r * static_cast<double>(q) * T, d);
}

double bonferroni_threshold(double p_v, int p) {
  if (p < 2) throw invalid_argument_error("bonferroni_threshold: p must be >= 2");
  return p_v / (static_cast<double>(p) * (static_cast<double>(p) - 1.0));
}

CausalityNetwork inference_network(const PrecisionMatrix& jm) {
  if (jm.p < 1 || jm.tau < 1)
    throw invalid_argument_error("inference_network: missing column map (p, tau)");
  if (jm.J.rows() != jm.n() || jm.J.cols() != jm.n())
    throw invalid_argument_error(
        "inference_network: precision size does not match p * (tau + 1)");
  CausalityNetwork net = make_empty_network(jm.p);
  for (int i = 0; i < jm.p; ++i) {
    for (int j = 0; j < jm.p; ++j) {
      if (i == j) continue;
      bool linked = false;
      for (int lag = 1; lag <= jm.tau && !linked; ++lag)
        linked = std::abs(jm.J(jm.col(i, lag), jm.col(j, 0))) > 1e-10;
      if (linked) net.set_edge(i, j, true);
    }
  }
  return net;
}

CausalityNetwork validated_network(const TEMatrix& te, int q, int tau,
                                   const ValidationParams& params) {
  check_params(params);
  const int p = te.p();
  if (p < 2) throw invalid_argument_error("validated_network: need p >= 2");
  if (te.T.rows() != te.T.cols())
    throw invalid_argument_error("validated_network: TE matrix must be square");
  const double threshold =
      params.bonferroni ? bonferroni_threshold(params.p_v, p) : params.p_v;
  CausalityNetwork net = make_empty_network(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j && te_pvalue(te.T(i, j), q, tau, params) < threshold)
        net.set_edge(i, j, true);
  return net;
}

ConfusionCounts confusion(const CausalityNetwork& retrieved,
                          const CausalityNetwork& truth) {
  if (retrieved.p != truth.p)
    throw invalid_argument_error("confusion: networks have different sizes");
  ConfusionCounts c;
  for (int i = 0; i < truth.p; ++i) {
    for (int j = 0; j < truth.p; ++j) {
      if (i == j) continue;
      const bool got = retrieved.edge(i, j);
      const bool real = truth.edge(i, j);
      if (got && real)
        ++c.TP;
      else if (got && !real)
        ++c.FP;
      else if (!got && real)
        ++c.FN;
      else
        ++c.TN;
    }
  }
  return c;
}

double hypergeometric_pvalue(long long TP, long long n, long long K, int p) {
  if (p < 2) throw invalid_argument_error("hypergeometric_pvalue: p must be >= 2");
  const long long M = static_cast<long long>(p) * (p - 1);
  if (n < 0 || K < 0 || n > M || K > M)
    throw invalid_argument_error(
        "hypergeometric_pvalue: n and K must lie in [0, p^2 - p]");
  if (TP < 0 || TP > std::min(n, K))
    throw invalid_argument_error(
        "hypergeometric_pvalue: TP must lie in [0, min(n, K)]");
  if (TP == 0) return 1.0;

  // Upper tail P(X >= TP), summed in log-space with the largest term
  // factored out so p = 100 scale counts cannot overflow or underflow.
  const long long k_min = TP;
  const long long k_max = std::min(n, K);
  const double log_denom = log_choose(M, n);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (long long k = k_min; k <= k_max; ++k) {
    if (n - k > M - K) continue;  // more misses than non-links available
    log_terms.push_back(log_choose(K, k) + log_choose(M - K, n - k) - log_denom);
  }
  if (log_terms.empty()) return 0.0;
  const double peak = *std::max_element(log_terms.begin(), log_terms.end());
  double sum = 0.0;
  for (double lt : log_terms) sum += std::exp(lt - peak);
  const double tail = std::exp(peak) * sum;
  return std::min(1.0, std::max(0.0, tail));
}

}  // namespace causnet
