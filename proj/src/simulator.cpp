#include "causnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "causnet/rng.hpp"

namespace causnet {

namespace {

bool all_upper_triangular(const ProcessSpec& spec) {
  for (const auto& a : spec.coeffs)
    for (int i = 1; i < spec.p; ++i)
      for (int j = 0; j < i; ++j)
        if (a(i, j) != 0.0) return false;
  return true;
}

// Spectral radius of the tau x tau scalar companion matrix with top row a[0..tau-1].
double scalar_companion_radius(const std::vector<double>& a) {
  int tau = static_cast<int>(a.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(tau, tau);
  for (int l = 0; l < tau; ++l) c(0, l) = a[l];
  for (int r = 1; r < tau; ++r) c(r, r - 1) = 1.0;
  return c.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

double companion_spectral_radius(const ProcessSpec& spec) {
  const int p = spec.p, tau = spec.tau;
  if (p <= 0 || tau <= 0 || static_cast<int>(spec.coeffs.size()) != tau)
    throw invalid_argument_error("companion_spectral_radius: malformed spec");
  if (all_upper_triangular(spec)) {
    // With triangular coefficient matrices the companion matrix is similar to
    // a block-triangular matrix whose diagonal blocks are the per-variable
    // scalar companions, so the radius is the max over variables.
    double rho = 0.0;
    std::vector<double> a(tau);
    for (int v = 0; v < p; ++v) {
      for (int l = 0; l < tau; ++l) a[l] = spec.coeffs[l](v, v);
      rho = std::max(rho, scalar_companion_radius(a));
    }
    return rho;
  }
  const int n = p * tau;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < tau; ++l) c.block(0, l * p, p, p) = spec.coeffs[l];
  for (int l = 1; l < tau; ++l)
    c.block(l * p, (l - 1) * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  return c.eigenvalues().cwiseAbs().maxCoeff();
}

ProcessSpec generate_process_spec(int p, int tau, int n_links,
                                  std::uint64_t rng_seed) {
  if (p < 2) throw invalid_argument_error("generate_process_spec: p must be >= 2");
  if (tau < 1) throw invalid_argument_error("generate_process_spec: tau must be >= 1");
  const long max_links = static_cast<long>(p) * (p - 1) / 2;
  if (n_links < 1 || n_links > max_links)
    throw invalid_argument_error(
        "generate_process_spec: n_links must be in [1, p(p-1)/2]");

  ProcessSpec spec;
  spec.p = p;
  spec.tau = tau;
  spec.seed = rng_seed;
  spec.coeffs.assign(tau, Eigen::MatrixXd::Zero(p, p));

  rng_engine eng(rng_seed);
  std::normal_distribution<double> normal01(0.0, 1.0);
  std::uniform_int_distribution<int> lag_dist(0, tau - 1);

  // All strict-upper-triangle slots (i < j); column j causes row i.
  std::vector<std::pair<int, int>> slots;
  slots.reserve(max_links);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) slots.emplace_back(i, j);

  // Uniform sample of n_links distinct slots via partial Fisher-Yates.
  for (int k = 0; k < n_links; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, slots.size() - 1);
    std::swap(slots[k], slots[pick(eng)]);
  }
  slots.resize(n_links);
  std::sort(slots.begin(), slots.end());

  for (const auto& [i, j] : slots) {
    int lag = lag_dist(eng);
    double c = 0.0;
    while (c == 0.0) c = normal01(eng);
    spec.coeffs[lag](i, j) = c;
  }

  // The diagonal is part of the same sparse budget as the links: each variable
  // draws a lag-1 self-coefficient only with probability 2/(p+1), the share of
  // diagonal slots among all upper-triangle-plus-diagonal slots. A typical
  // process therefore carries a couple of autocorrelated variables alongside
  // its n_links cross links rather than a dense autoregressive diagonal, which
  // would otherwise dominate the strongest sample correlations and crowd the
  // cross links out of topology-constrained estimators.
  std::normal_distribution<double> diag_dist(0.0, 0.5);
  std::uniform_real_distribution<double> diag_gate(0.0, 1.0);
  const double diag_density = 2.0 / (p + 1);
  for (int k = 0; k < p; ++k) {
    if (diag_gate(eng) >= diag_density) continue;
    spec.coeffs[0](k, k) = std::clamp(diag_dist(eng), -0.9, 0.9);
  }

  // Stationarity guard: shrink the whole tensor until the companion radius
  // sits below 0.95. The triangular construction already keeps it <= 0.9, so
  // this loop is a safety net rather than the normal path.
  for (int guard = 0; guard < 64; ++guard) {
    double rho = companion_spectral_radius(spec);
    if (rho < 0.95) break;
    double s = 0.95 / rho;
    for (auto& a : spec.coeffs) a *= s;
  }
  return spec;
}

CausalityNetwork true_network(const ProcessSpec& spec) {
  CausalityNetwork net = make_empty_network(spec.p);
  for (int l = 0; l < spec.tau; ++l)
    for (int i = 0; i < spec.p; ++i)
      for (int j = 0; j < spec.p; ++j)
        if (i != j && spec.coeffs[l](i, j) != 0.0) net.set_edge(j, i, true);
  return net;
}

TimeSeriesPanel simulate(const ProcessSpec& spec, int q_raw, int burn_in,
                         std::uint64_t rng_seed, double bound) {
  const int p = spec.p, tau = spec.tau;
  if (q_raw < tau + 1)
    throw invalid_argument_error("simulate: q_raw must be >= tau + 1");
  if (burn_in < 0) throw invalid_argument_error("simulate: burn_in must be >= 0");

  rng_engine eng(rng_seed);
  std::normal_distribution<double> normal01(0.0, 1.0);

  const int total = burn_in + q_raw;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(total, p);
  Eigen::VectorXd zt(p), u(p);
  for (int t = 0; t < total; ++t) {
    for (int v = 0; v < p; ++v) u(v) = normal01(eng);
    zt = u;
    for (int l = 0; l < tau; ++l) {
      int tl = t - (l + 1);
      if (tl < 0) break;  // zero initial history
      zt.noalias() += spec.coeffs[l] * z.row(tl).transpose();
    }
    if (!zt.allFinite() || zt.cwiseAbs().maxCoeff() > bound)
      throw numeric_overflow_error(
          "simulate: sample magnitude exceeded bound; spec looks non-stationary");
    z.row(t) = zt.transpose();
  }

  TimeSeriesPanel panel;
  panel.spec_seed = spec.seed;
  panel.data = z.bottomRows(q_raw);
  return panel;
}

LaggedPanel build_lagged_panel(const TimeSeriesPanel& panel, int tau) {
  const int q_raw = static_cast<int>(panel.data.rows());
  const int p = static_cast<int>(panel.data.cols());
  if (tau < 1) throw invalid_argument_error("build_lagged_panel: tau must be >= 1");
  const int q = q_raw - tau;
  if (q <= 0)
    throw invalid_argument_error(
        "build_lagged_panel: need more than tau rows of data");

  LaggedPanel lp;
  lp.p = p;
  lp.tau = tau;
  lp.X.resize(q, p * (tau + 1));
  for (int l = 0; l <= tau; ++l)
    lp.X.middleCols(l * p, p) = panel.data.middleRows(tau - l, q);
  return lp;
}

}  // namespace causnet
