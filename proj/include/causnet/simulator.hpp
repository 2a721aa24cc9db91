#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "causnet/errors.hpp"

namespace causnet {

// Ground-truth generative model: Z_t = sum_{lag=1..tau} A_lag Z_{t-lag} + U_t.
// Every A_lag is upper triangular (diagonal included). A nonzero (A_lag)_{ij}
// with i != j means variable j drives variable i: column causes row. Because
// only the upper triangle is populated, higher-index variables drive
// lower-index ones and the causal structure is acyclic.
struct ProcessSpec {
  int p = 0;
  int tau = 0;
  std::vector<Eigen::MatrixXd> coeffs;  // coeffs[l] is A_{l+1}, each p x p
  std::uint64_t seed = 0;
};

// Directed network over the p variables; entry (i,j) true iff i -> j.
// The diagonal is ignored by every scoring operation.
struct CausalityNetwork {
  int p = 0;
  std::vector<char> adjacency;  // row-major p*p

  bool edge(int i, int j) const { return adjacency[static_cast<std::size_t>(i) * p + j] != 0; }
  void set_edge(int i, int j, bool v) {
    adjacency[static_cast<std::size_t>(i) * p + j] = v ? 1 : 0;
  }
  // Number of off-diagonal true entries.
  int edge_count() const {
    int c = 0;
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        if (i != j && edge(i, j)) ++c;
    return c;
  }
};

inline CausalityNetwork make_empty_network(int p) {
  CausalityNetwork net;
  net.p = p;
  net.adjacency.assign(static_cast<std::size_t>(p) * p, 0);
  return net;
}

// Raw simulated sample path: rows = time, columns = variables.
struct TimeSeriesPanel {
  Eigen::MatrixXd data;
  std::uint64_t spec_seed = 0;
};

// Design matrix holding every variable at every lag 0..tau.
// Column layout: lag-0 block of all p variables first, then lag-1, ..., lag-tau,
// i.e. column(variable v, lag l) = l*p + v. Rows are the q = q_raw - tau time
// points for which every lag is available.
struct LaggedPanel {
  Eigen::MatrixXd X;
  int p = 0;
  int tau = 0;

  int q() const { return static_cast<int>(X.rows()); }
  int n_cols() const { return p * (tau + 1); }
  int col(int variable, int lag) const { return lag * p + variable; }
};

// Draws a sparse upper-triangular VAR(tau) spec: n_links off-diagonal causal
// pairs chosen uniformly from the strict upper triangle, each assigned a
// single uniform lag and a standard-normal coefficient. The diagonal belongs
// to the same sparse budget: each variable gets a lag-1 self coefficient from
// N(0, 0.5^2) clamped to [-0.9, 0.9] only with probability 2/(p+1), so most
// variables carry no autoregressive term. If the companion spectral radius is
// >= 0.95 the whole tensor is rescaled until it is below that bound.
ProcessSpec generate_process_spec(int p, int tau, int n_links,
                                  std::uint64_t rng_seed);

// Spectral radius of the (p*tau) x (p*tau) companion matrix of the spec.
// Uses the exact per-variable factorization when all A_lag are upper
// triangular, a dense eigensolver otherwise.
double companion_spectral_radius(const ProcessSpec& spec);

// The true directed causality network implied by the coefficients:
// edge j -> i iff some (A_lag)_{ij} != 0 with i != j.
CausalityNetwork true_network(const ProcessSpec& spec);

inline int default_burn_in(int tau) { return 100 * (tau + 1); }

// Simulates q_raw rows of the process after discarding burn_in initial rows,
// starting from a zero history, with i.i.d. standard normal innovations.
// Throws numeric_overflow_error if any sample magnitude exceeds bound.
TimeSeriesPanel simulate(const ProcessSpec& spec, int q_raw, int burn_in,
                         std::uint64_t rng_seed, double bound = 1e8);

// Builds the (q_raw - tau) x (p*(tau+1)) lagged design matrix.
LaggedPanel build_lagged_panel(const TimeSeriesPanel& panel, int tau);

}  // namespace causnet
