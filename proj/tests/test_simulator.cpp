#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "causnet/simulator.hpp"
#include "oracles.hpp"

using namespace causnet;

namespace {
// Full companion matrix built independently of the library.
Eigen::MatrixXd companion_of(const ProcessSpec& spec) {
  const int p = spec.p, tau = spec.tau, n = p * tau;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < tau; ++l) c.block(0, l * p, p, p) = spec.coeffs[l];
  for (int l = 1; l < tau; ++l)
    c.block(l * p, (l - 1) * p, p, p) = Eigen::MatrixXd::Identity(p, p);
  return c;
}
}  // namespace

TEST_CASE("generate_process_spec honours the link budget and triangular shape") {
  ProcessSpec spec = generate_process_spec(100, 5, 100, 7);
  REQUIRE(spec.coeffs.size() == 5);
  // strict lower triangle exactly zero in every lag matrix
  for (const auto& a : spec.coeffs)
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < i; ++j) CHECK(a(i, j) == 0.0);
  // self-coefficients, when present, live at lag 1 and stay below 1 in
  // magnitude
  for (int k = 0; k < 100; ++k) {
    CHECK(std::abs(spec.coeffs[0](k, k)) < 1.0);
    for (int l = 1; l < 5; ++l) CHECK(spec.coeffs[l](k, k) == 0.0);
  }
  CHECK(true_network(spec).edge_count() == 100);
}

TEST_CASE("self-coefficients form a sparse diagonal component") {
  // Each variable receives a lag-1 self term with probability 2/(p+1), so at
  // p=100 a process carries about two autocorrelated variables on average.
  int total = 0;
  const int n_specs = 200, p = 100;
  for (int s = 0; s < n_specs; ++s) {
    ProcessSpec spec = generate_process_spec(p, 5, 100, 500 + s);
    for (int k = 0; k < p; ++k)
      if (spec.coeffs[0](k, k) != 0.0) ++total;
  }
  double mean_count = static_cast<double>(total) / n_specs;
  // Binomial(100, 2/101): mean 1.98, std of the 200-spec mean about 0.1.
  CHECK(mean_count > 1.4);
  CHECK(mean_count < 2.6);
}

TEST_CASE("two-variable budget of one lands in the only admissible slot") {
  ProcessSpec spec = generate_process_spec(2, 1, 1, 99);
  CHECK(spec.coeffs[0](0, 1) != 0.0);
  CHECK(spec.coeffs[0](1, 0) == 0.0);
  CausalityNetwork net = true_network(spec);
  CHECK(net.edge_count() == 1);
  CHECK(net.edge(1, 0));  // variable 1 drives variable 0
}

TEST_CASE("generate_process_spec rejects out-of-range inputs") {
  CHECK_THROWS_AS(generate_process_spec(1, 1, 1, 0), invalid_argument_error);
  CHECK_THROWS_AS(generate_process_spec(5, 0, 1, 0), invalid_argument_error);
  CHECK_THROWS_AS(generate_process_spec(5, 2, 0, 0), invalid_argument_error);
  CHECK_THROWS_AS(generate_process_spec(5, 2, 11, 0), invalid_argument_error);
  CHECK_NOTHROW(generate_process_spec(5, 2, 10, 0));
}

TEST_CASE("companion spectral radius stays below one, cross-checked by growth rate") {
  ProcessSpec spec = generate_process_spec(5, 2, 3, 42);
  double rho_lib = companion_spectral_radius(spec);
  CHECK(rho_lib < 1.0);
  Eigen::MatrixXd c = companion_of(spec);
  REQUIRE(c.rows() == 10);
  double rho_oracle = oracle::spectral_radius_growth(c);
  CHECK(rho_oracle < 1.0);
  CHECK(rho_lib == doctest::Approx(rho_oracle).epsilon(1e-3));

  // a handful of other seeds, larger sizes
  for (std::uint64_t s : {1ull, 2ull, 3ull, 17ull}) {
    ProcessSpec sp = generate_process_spec(20, 3, 20, s);
    double rl = companion_spectral_radius(sp);
    CHECK(rl < 0.95);
    CHECK(rl == doctest::Approx(oracle::spectral_radius_growth(companion_of(sp)))
                    .epsilon(1e-3));
  }
}

TEST_CASE("dense companion path agrees on a non-triangular spec") {
  ProcessSpec spec;
  spec.p = 2;
  spec.tau = 1;
  spec.coeffs = {Eigen::MatrixXd::Zero(2, 2)};
  spec.coeffs[0] << 0.5, 0.0, 0.3, 0.2;  // lower-triangular coupling
  double rho = companion_spectral_radius(spec);
  CHECK(rho == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rho == doctest::Approx(oracle::spectral_radius_growth(companion_of(spec)))
                  .epsilon(1e-3));
}

TEST_CASE("true_network matches an exhaustive coefficient scan") {
  ProcessSpec spec = generate_process_spec(30, 4, 60, 1234);
  CausalityNetwork net = true_network(spec);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) {
      if (i == j) continue;
      bool expected = false;
      for (int l = 0; l < 4; ++l)
        if (spec.coeffs[l](j, i) != 0.0) expected = true;  // column i -> row j
      CHECK(net.edge(i, j) == expected);
    }
  CHECK(net.edge_count() == 60);
}

TEST_CASE("simulate with zero coefficients produces i.i.d. standard normals") {
  ProcessSpec spec;
  spec.p = 4;
  spec.tau = 2;
  spec.coeffs = {Eigen::MatrixXd::Zero(4, 4), Eigen::MatrixXd::Zero(4, 4)};
  const int q = 4000;
  TimeSeriesPanel panel = simulate(spec, q, 0, 5);
  REQUIRE(panel.data.rows() == q);
  for (int v = 0; v < 4; ++v) {
    double mean = panel.data.col(v).mean();
    double var = (panel.data.col(v).array() - mean).square().sum() / q;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(q)));
    CHECK(var > 0.8);
    CHECK(var < 1.2);
  }
}

TEST_CASE("bivariate unit-coefficient chain has population variance two") {
  ProcessSpec spec;
  spec.p = 2;
  spec.tau = 1;
  spec.coeffs = {Eigen::MatrixXd::Zero(2, 2)};
  spec.coeffs[0](0, 1) = 1.0;  // variable 1 drives variable 0 one step later
  TimeSeriesPanel panel = simulate(spec, 20000, 100, 11);
  double mean = panel.data.col(0).mean();
  double var = (panel.data.col(0).array() - mean).square().sum() / 20000.0;
  CHECK(var == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("simulate is deterministic in the seed and prefix-stable in q_raw") {
  ProcessSpec spec = generate_process_spec(6, 2, 5, 3);
  TimeSeriesPanel a = simulate(spec, 50, 40, 77);
  TimeSeriesPanel b = simulate(spec, 50, 40, 77);
  CHECK(a.data == b.data);
  TimeSeriesPanel c = simulate(spec, 50, 40, 78);
  CHECK(a.data != c.data);
  // longer run under the same seed starts with the identical prefix
  TimeSeriesPanel d = simulate(spec, 120, 40, 77);
  CHECK(a.data == d.data.topRows(50));
}

TEST_CASE("simulate flags runaway samples from an unstable spec") {
  ProcessSpec spec;
  spec.p = 2;
  spec.tau = 1;
  spec.coeffs = {Eigen::MatrixXd::Zero(2, 2)};
  spec.coeffs[0](0, 0) = 1.5;
  spec.coeffs[0](1, 1) = 0.1;
  CHECK_THROWS_AS(simulate(spec, 300, 0, 1), numeric_overflow_error);
}

TEST_CASE("lagged panel layout: lag-0 block first, shift semantics exact") {
  ProcessSpec spec = generate_process_spec(3, 2, 2, 21);
  TimeSeriesPanel panel = simulate(spec, 40, 50, 9);
  LaggedPanel lp = build_lagged_panel(panel, 2);
  REQUIRE(lp.q() == 38);
  REQUIRE(lp.n_cols() == 9);
  for (int t = 0; t < lp.q(); ++t)
    for (int v = 0; v < 3; ++v)
      for (int l = 0; l <= 2; ++l)
        CHECK(lp.X(t, lp.col(v, l)) == panel.data(2 + t - l, v));
}

TEST_CASE("lagged panel shapes and failure modes") {
  TimeSeriesPanel panel;
  panel.data = Eigen::MatrixXd::Random(3, 2);
  LaggedPanel lp = build_lagged_panel(panel, 1);
  CHECK(lp.q() == 2);
  CHECK(lp.n_cols() == 4);
  CHECK(lp.col(1, 1) == 3);

  TimeSeriesPanel tiny;
  tiny.data = Eigen::MatrixXd::Random(2, 2);
  CHECK_THROWS_AS(build_lagged_panel(tiny, 2), invalid_argument_error);

  // p=100, tau=5 must give the 600-column frame
  ProcessSpec spec = generate_process_spec(100, 5, 100, 2);
  TimeSeriesPanel big = simulate(spec, 15, 10, 3);
  CHECK(build_lagged_panel(big, 5).n_cols() == 600);
}
