#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "causnet/estimators.hpp"
#include "causnet/simulator.hpp"
#include "oracles.hpp"

using namespace causnet;

namespace {

LaggedPanel panel_from_matrix(const Eigen::MatrixXd& x, int p, int tau) {
  LaggedPanel lp;
  lp.X = x;
  lp.p = p;
  lp.tau = tau;
  return lp;
}

Eigen::MatrixXd random_panel_data(int q, int n, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd x(q, n);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = nd(eng);
  return x;
}

CovarianceModel random_correlation_model(int n, int q, std::uint64_t seed) {
  LaggedPanel lp = panel_from_matrix(random_panel_data(q, n, seed), n, 0);
  return covariance(lp, true);
}

double penalized_objective(const Eigen::MatrixXd& j, const Eigen::MatrixXd& s,
                           double gamma) {
  return std::log(j.determinant()) - (s.array() * j.array()).sum() -
         gamma * j.cwiseAbs().sum();
}

}  // namespace

TEST_CASE("covariance matches the naive double-loop oracle") {
  LaggedPanel lp = panel_from_matrix(random_panel_data(37, 6, 4), 3, 1);
  CovarianceModel raw = covariance(lp, false);
  Eigen::MatrixXd expect = oracle::naive_covariance(lp.X);
  CHECK((raw.S - expect).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(raw.q == 37);
  CHECK(raw.p == 3);
  CHECK(raw.tau == 1);

  CovarianceModel std_model = covariance(lp, true);
  Eigen::MatrixXd expect_corr = oracle::naive_correlation(lp.X);
  CHECK((std_model.S - expect_corr).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 6; ++i) CHECK(std_model.S(i, i) == 1.0);
}

TEST_CASE("covariance failure modes") {
  Eigen::MatrixXd x = random_panel_data(20, 3, 5);
  x.col(1).setConstant(2.5);
  CHECK_THROWS_AS(covariance(panel_from_matrix(x, 3, 0), false), zero_variance_error);

  Eigen::MatrixXd one_row = random_panel_data(1, 3, 5);
  CHECK_THROWS_AS(covariance(panel_from_matrix(one_row, 3, 0), false),
                  invalid_argument_error);

  Eigen::MatrixXd dup = random_panel_data(25, 2, 6);
  dup.col(1) = dup.col(0);
  CovarianceModel m = covariance(panel_from_matrix(dup, 2, 0), true);
  CHECK(m.S(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ridge identity and blend-collapse cases") {
  CovarianceModel id = make_covariance_model(Eigen::MatrixXd::Identity(5, 5), 50, true);
  for (double g : {0.0, 0.3, 1.0}) {
    PrecisionMatrix jm = ridge_precision(id, g);
    CHECK((jm.J - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
  }
  CovarianceModel any = random_correlation_model(6, 40, 7);
  PrecisionMatrix j1 = ridge_precision(any, 1.0);
  CHECK((j1.J - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ridge inverts the blended covariance to high accuracy") {
  CovarianceModel m = random_correlation_model(12, 300, 8);
  PrecisionMatrix jm = ridge_precision(m, 0.1);
  Eigen::MatrixXd blend = 0.9 * m.S;
  blend.diagonal().array() += 0.1;
  CHECK((jm.J * blend - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() <
        1e-8);
  CHECK(jm.dense_support);
  CHECK(jm.in_support(3, 7));
}

TEST_CASE("ridge gamma edge cases") {
  CHECK_THROWS_AS(ridge_precision(random_correlation_model(4, 30, 1), -0.1),
                  invalid_argument_error);
  CHECK_THROWS_AS(ridge_precision(random_correlation_model(4, 30, 1), 1.5),
                  invalid_argument_error);
  // rank-deficient S (more columns than rows) cannot be inverted at gamma = 0
  CovarianceModel thin = random_correlation_model(10, 5, 2);
  CHECK_THROWS_AS(ridge_precision(thin, 0.0), near_singular_error);
  // well-conditioned S at gamma = 0 is the plain inverse
  CovarianceModel fat = random_correlation_model(5, 400, 3);
  PrecisionMatrix j0 = ridge_precision(fat, 0.0);
  CHECK((j0.J * fat.S - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("ridge condition number is non-increasing in gamma") {
  CovarianceModel m = random_correlation_model(15, 25, 9);
  double prev = std::numeric_limits<double>::infinity();
  for (double g : {0.01, 0.1, 0.5}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ridge_precision(m, g).J);
    double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    CHECK(cond <= prev * (1.0 + 1e-12));
    prev = cond;
  }
}

TEST_CASE("glasso full-sparsity threshold gives the diagonal solution") {
  CovarianceModel m = random_correlation_model(8, 60, 10);
  double gmax = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = i + 1; j < 8; ++j) gmax = std::max(gmax, std::abs(m.S(i, j)));
  PrecisionMatrix jm = glasso_precision(m, gmax + 0.01);
  CHECK(jm.support.empty());
  for (int i = 0; i < 8; ++i) {
    CHECK(jm.J(i, i) == doctest::Approx(1.0 / (1.0 + gmax + 0.01)).epsilon(1e-10));
    for (int j = 0; j < 8; ++j)
      if (i != j) CHECK(jm.J(i, j) == 0.0);
  }
}

TEST_CASE("glasso at gamma zero is the unpenalized inverse") {
  CovarianceModel m = random_correlation_model(6, 500, 11);
  PrecisionMatrix jm = glasso_precision(m, 0.0);
  CHECK((jm.J * m.S - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("glasso 2x2 soft-threshold closed form and grid-search oracle") {
  Eigen::MatrixXd s(2, 2);
  s << 1.0, 0.6, 0.6, 1.0;
  CovarianceModel m = make_covariance_model(s, 100, true);
  PrecisionMatrix jm = glasso_precision(m, 0.2, 1e-7);
  Eigen::MatrixXd w = jm.J.inverse();
  CHECK(w(0, 1) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(jm.J(0, 0) == doctest::Approx(0.9375).epsilon(1e-5));
  CHECK(jm.J(0, 1) == doctest::Approx(-0.3125).epsilon(1e-5));
  // sign pattern demanded by the stationarity conditions
  CHECK(jm.J(0, 1) < 0.0);
  CHECK(s(0, 1) - w(0, 1) > 0.0);

  // grid-search oracle: the penalized objective over the one-parameter family
  // W(t) = [[1.2, t], [t, 1.2]] peaks at t = 0.4
  double best_t = -1.0, best_obj = -1e300;
  for (double t = 0.0; t <= 0.59; t += 0.001) {
    Eigen::MatrixXd wt(2, 2);
    wt << 1.2, t, t, 1.2;
    double obj = penalized_objective(wt.inverse(), s, 0.2);
    if (obj > best_obj) {
      best_obj = obj;
      best_t = t;
    }
  }
  CHECK(best_t == doctest::Approx(0.4).epsilon(2e-3));
  CHECK(penalized_objective(jm.J, s, 0.2) >= best_obj - 1e-8);
}

TEST_CASE("glasso KKT residuals and duality identity on random problems") {
  for (std::uint64_t seed : {21ull, 22ull, 23ull, 24ull}) {
    const int n = 14;
    // panel with genuine cross-correlation so the support is non-trivial
    ProcessSpec spec = generate_process_spec(n, 1, 20, seed);
    TimeSeriesPanel ts = simulate(spec, 120, 200, seed + 1);
    CovarianceModel m = covariance(build_lagged_panel(ts, 1), true);
    for (double gamma : {0.1, 0.3}) {
      PrecisionMatrix jm = glasso_precision(m, gamma);
      Eigen::MatrixXd w = jm.J.inverse();
      int nonzero = 0;
      for (int i = 0; i < m.n(); ++i)
        for (int j = 0; j < m.n(); ++j) {
          if (i == j) continue;
          double resid = m.S(i, j) - w(i, j);
          CHECK(std::abs(resid) <= gamma + 1e-4);
          if (jm.J(i, j) != 0.0) {
            ++nonzero;
            // active entries sit on the penalty boundary with opposing sign
            CHECK(std::abs(resid + gamma * (jm.J(i, j) > 0 ? 1.0 : -1.0)) < 1e-3);
            CHECK((jm.J(i, j) > 0) == (resid < 0));
          }
        }
      if (gamma == 0.1) CHECK(nonzero > 0);
      // zero duality gap at the optimum: tr(SJ) + gamma*||J||_1 = N
      double identity = (m.S.array() * jm.J.array()).sum() +
                        gamma * jm.J.cwiseAbs().sum();
      CHECK(identity == doctest::Approx(m.n()).epsilon(1e-4));
      // exact zeros off support, and positive definiteness
      for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
          if (!jm.in_support(i, j)) CHECK(jm.J(i, j) == 0.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm.J);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("glasso beats the diagonal-only solution on the penalized objective") {
  CovarianceModel m = random_correlation_model(10, 80, 31);
  double gamma = 0.1;
  PrecisionMatrix jm = glasso_precision(m, gamma);
  Eigen::MatrixXd jdiag = Eigen::MatrixXd::Zero(10, 10);
  jdiag.diagonal().setConstant(1.0 / (1.0 + gamma));
  CHECK(penalized_objective(jm.J, m.S, gamma) >=
        penalized_objective(jdiag, m.S, gamma) - 1e-10);
}

TEST_CASE("glasso reports non-convergence with its last iterate") {
  CovarianceModel m = random_correlation_model(12, 30, 41);
  bool threw = false;
  try {
    glasso_precision(m, 0.02, 1e-13, 1);
  } catch (const glasso_convergence_error& e) {
    threw = true;
    CHECK(e.iterations == 1);
    CHECK(e.residual > 1e-13);
    CHECK(e.last_iterate.rows() == 12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.last_iterate);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("logo on four variables at gamma zero is the exact inverse") {
  CovarianceModel m = random_correlation_model(4, 200, 51);
  PrecisionMatrix jm = logo_precision(m, 0.0);
  CHECK((jm.J - m.S.inverse()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(jm.support.size() == 6);
}

TEST_CASE("logo at gamma zero preserves covariances on every kept edge") {
  for (std::uint64_t seed : {61ull, 62ull, 63ull}) {
    CovarianceModel m = random_correlation_model(12, 400, seed);
    PrecisionMatrix jm = logo_precision(m, 0.0);
    Eigen::MatrixXd w = jm.J.inverse();
    for (const auto& [i, j] : jm.support)
      CHECK(w(i, j) == doctest::Approx(m.S(i, j)).epsilon(1e-8));
    for (int i = 0; i < 12; ++i)
      CHECK(w(i, i) == doctest::Approx(m.S(i, i)).epsilon(1e-8));
  }
}

TEST_CASE("logo reconstructs a precision whose support fits its own scaffold") {
  CovarianceModel m = random_correlation_model(10, 300, 71);
  PrecisionMatrix j0 = logo_precision(m, 0.0);
  Eigen::MatrixXd sigma_star = j0.J.inverse();
  sigma_star = ((sigma_star + sigma_star.transpose()) * 0.5).eval();
  CovarianceModel m2 = make_covariance_model(sigma_star, 300, false);
  PrecisionMatrix j1 = logo_precision(m2, 0.0);
  if (j1.support == j0.support) {
    CHECK((j1.J - j0.J).cwiseAbs().maxCoeff() < 1e-7);
  }
  // the defining preservation property holds either way
  Eigen::MatrixXd w = j1.J.inverse();
  for (const auto& [i, j] : j1.support)
    CHECK(w(i, j) == doctest::Approx(sigma_star(i, j)).epsilon(1e-8));
}

TEST_CASE("logo with shrinkage stays positive definite with bounded support") {
  for (int n : {6, 20, 35}) {
    CovarianceModel m = random_correlation_model(n, 15, 80 + n);  // q << n
    PrecisionMatrix jm = logo_precision(m, 0.1);
    CHECK(jm.support.size() <= static_cast<std::size_t>(3 * n - 6));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm.J);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK((jm.J - jm.J.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (!jm.in_support(i, j)) CHECK(jm.J(i, j) == 0.0);
  }
}

TEST_CASE("logo failure modes") {
  CHECK_THROWS_AS(logo_precision(random_correlation_model(3, 30, 90), 0.1),
                  invalid_argument_error);
  // duplicated variable makes the seed clique singular at gamma = 0
  Eigen::MatrixXd x = random_panel_data(50, 6, 91);
  x.col(1) = x.col(0);
  CovarianceModel m = covariance(panel_from_matrix(x, 6, 0), true);
  CHECK_THROWS_AS(logo_precision(m, 0.0), near_singular_error);
  CHECK_THROWS_AS(logo_precision(m, -0.2), invalid_argument_error);
}

TEST_CASE("column map carried from panel to precision matrix") {
  ProcessSpec spec = generate_process_spec(3, 2, 2, 5);
  TimeSeriesPanel ts = simulate(spec, 50, 100, 6);
  CovarianceModel m = covariance(build_lagged_panel(ts, 2), true);
  PrecisionMatrix jm = ridge_precision(m, 0.1);
  CHECK(jm.p == 3);
  CHECK(jm.tau == 2);
  CHECK(jm.col(2, 1) == 5);
  CHECK(jm.col(0, 0) == 0);
}

TEST_CASE("log likelihood plug-in value and trace identities") {
  CovarianceModel id = make_covariance_model(Eigen::MatrixXd::Identity(2, 2), 10, true);
  PrecisionMatrix jm;
  jm.J = Eigen::MatrixXd::Identity(2, 2);
  LikelihoodParts parts = log_likelihood_parts(jm, id);
  CHECK(parts.value == doctest::Approx(-28.378770664093453).epsilon(1e-12));
  CHECK(parts.trace_sj == doctest::Approx(2.0).epsilon(1e-12));

  // ridge gamma = 1 on standardized S: J = I, trace = N
  CovarianceModel m = random_correlation_model(7, 90, 101);
  PrecisionMatrix j1 = ridge_precision(m, 1.0);
  CHECK(log_likelihood_parts(j1, m).trace_sj == doctest::Approx(7.0).epsilon(1e-10));

  // ridge gamma -> 0 on invertible S: trace(S S^-1) = N
  CovarianceModel fat = random_correlation_model(6, 600, 102);
  PrecisionMatrix j0 = ridge_precision(fat, 0.0);
  CHECK(log_likelihood_parts(j0, fat).trace_sj == doctest::Approx(6.0).epsilon(1e-8));

  // logo at gamma 0: trace telescopes to 4(N-3) - 3(N-4) = N for any input
  CovarianceModel any = random_correlation_model(11, 700, 103);
  PrecisionMatrix jl = logo_precision(any, 0.0);
  CHECK(log_likelihood_parts(jl, any).trace_sj == doctest::Approx(11.0).epsilon(1e-8));

  // glasso likelihood dominates the diagonal-only model's likelihood
  PrecisionMatrix jg = glasso_precision(any, 0.15);
  PrecisionMatrix jd = jg;
  jd.J = Eigen::MatrixXd::Zero(11, 11);
  jd.J.diagonal().setConstant(1.0 / 1.15);
  CHECK(log_likelihood(jg, any) >=
        log_likelihood(jd, any) + any.q * 0.15 / 2.0 *
            (jd.J.cwiseAbs().sum() - jg.J.cwiseAbs().sum()) - 1e-8);

  // non-PD input is rejected
  PrecisionMatrix bad;
  bad.J = Eigen::MatrixXd::Identity(3, 3);
  bad.J(2, 2) = -1.0;
  CHECK_THROWS_AS(log_likelihood(bad, make_covariance_model(
                                          Eigen::MatrixXd::Identity(3, 3), 5, true)),
                  not_positive_definite_error);
}
