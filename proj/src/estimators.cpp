#include "causnet/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "causnet/linalg.hpp"

namespace causnet {

const char* method_name(Method m) {
  switch (m) {
    case Method::ridge: return "ridge";
    case Method::glasso: return "glasso";
    case Method::logo: return "logo";
  }
  return "?";
}

bool PrecisionMatrix::in_support(int i, int j) const {
  if (i == j) return true;
  if (dense_support) return true;
  if (i > j) std::swap(i, j);
  return std::binary_search(support.begin(), support.end(), std::make_pair(i, j));
}

CovarianceModel covariance(const LaggedPanel& panel, bool standardize) {
  const int q = panel.q();
  const int n = panel.n_cols();
  if (q < 2) throw invalid_argument_error("covariance: need at least 2 rows");

  Eigen::MatrixXd x = panel.X.rowwise() - panel.X.colwise().mean();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  s.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0 / q);
  s.triangularView<Eigen::StrictlyUpper>() =
      s.triangularView<Eigen::StrictlyLower>().transpose();

  for (int j = 0; j < n; ++j) {
    double mean = panel.X.col(j).mean();
    if (s(j, j) <= 1e-20 * (1.0 + mean * mean))
      throw zero_variance_error("covariance: column " + std::to_string(j) +
                                " has (near-)zero variance");
  }

  if (standardize) {
    Eigen::VectorXd inv_sd = s.diagonal().array().sqrt().inverse();
    s = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
    s.diagonal().setOnes();
    // keep exact symmetry after the scaling
    s = ((s + s.transpose()) * 0.5).eval();
  }

  CovarianceModel model;
  model.S = std::move(s);
  model.q = q;
  model.standardized = standardize;
  model.p = panel.p;
  model.tau = panel.tau;
  return model;
}

CovarianceModel make_covariance_model(const Eigen::MatrixXd& s, int q,
                                      bool standardized, int p, int tau) {
  CovarianceModel model;
  model.S = s;
  model.q = q;
  model.standardized = standardized;
  model.p = p;
  model.tau = tau;
  return model;
}

PrecisionMatrix ridge_precision(const CovarianceModel& model, double gamma) {
  if (gamma < 0.0 || gamma > 1.0)
    throw invalid_argument_error("ridge_precision: gamma must be in [0, 1]");
  const int n = model.n();
  Eigen::MatrixXd blend = (1.0 - gamma) * model.S;
  blend.diagonal().array() += gamma;

  Eigen::LLT<Eigen::MatrixXd> llt(blend);
  if (llt.info() != Eigen::Success)
    throw near_singular_error(
        "ridge_precision: blended covariance is not invertible (gamma too small "
        "for a rank-deficient S)");

  PrecisionMatrix out;
  out.J = llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.J = ((out.J + out.J.transpose()) * 0.5).eval();
  out.method = Method::ridge;
  out.gamma = gamma;
  out.dense_support = true;
  out.p = model.p;
  out.tau = model.tau;
  return out;
}

namespace {

// Recover J column-by-column from the working covariance W and the
// coefficient matrix B (B(k,j) = regression weight of variable k for column
// j, diagonal unused and zero).
Eigen::MatrixXd recover_precision(const Eigen::MatrixXd& w,
                                  const Eigen::MatrixXd& b) {
  const int n = static_cast<int>(w.rows());
  Eigen::MatrixXd j(n, n);
  for (int col = 0; col < n; ++col) {
    double denom = w(col, col) - w.col(col).dot(b.col(col));
    double jjj = 1.0 / denom;
    j.col(col) = -b.col(col) * jjj;
    j(col, col) = jjj;
  }
  return ((j + j.transpose()) * 0.5).eval();
}

double penalized_gap(const Eigen::MatrixXd& s, const Eigen::MatrixXd& j,
                     double gamma) {
  const double trace = (s.array() * j.array()).sum();
  const double l1 = j.cwiseAbs().sum();
  return trace + gamma * l1 - static_cast<double>(s.rows());
}

}  // namespace

PrecisionMatrix glasso_precision(const CovarianceModel& model, double gamma,
                                 double tol, int max_iter) {
  if (gamma < 0.0) throw invalid_argument_error("glasso_precision: gamma must be >= 0");
  if (tol <= 0.0) throw invalid_argument_error("glasso_precision: tol must be > 0");
  const int n = model.n();
  const Eigen::MatrixXd& s = model.S;

  PrecisionMatrix out;
  out.method = Method::glasso;
  out.gamma = gamma;
  out.dense_support = false;
  out.p = model.p;
  out.tau = model.tau;

  if (n == 1) {
    out.J = Eigen::MatrixXd::Constant(1, 1, 1.0 / (s(0, 0) + gamma));
    return out;
  }

  if (gamma == 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success)
      throw near_singular_error(
          "glasso_precision: gamma = 0 needs an invertible covariance");
    out.J = llt.solve(Eigen::MatrixXd::Identity(n, n));
    out.J = ((out.J + out.J.transpose()) * 0.5).eval();
  } else {
    Eigen::MatrixXd w = s;
    w.diagonal().array() += gamma;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd u(n);

    auto soft = [](double x, double g) {
      if (x > g) return x - g;
      if (x < -g) return x + g;
      return 0.0;
    };

    const double inner_tol = 0.1 * tol;
    bool converged = false;
    double residual = 0.0;
    int sweep = 0;
    for (sweep = 1; sweep <= max_iter; ++sweep) {
      double max_dw = 0.0;
      for (int j = 0; j < n; ++j) {
        // u(k) = sum_{m != j} W(k,m) B(m,j); B(j,j) stays zero.
        u.noalias() = w * b.col(j);

        auto pass = [&](bool full) {
          double max_delta = 0.0;
          for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            double bk = b(k, j);
            if (!full && bk == 0.0) continue;
            double g = s(k, j) - (u(k) - w(k, k) * bk);
            double bk_new = soft(g, gamma) / w(k, k);
            if (bk_new != bk) {
              double delta = bk_new - bk;
              u.noalias() += delta * w.col(k);
              b(k, j) = bk_new;
              max_delta = std::max(max_delta, std::abs(delta));
            }
          }
          return max_delta;
        };

        double d = pass(true);
        int guard = 0;
        while (d > inner_tol && guard++ < 500) {
          double da = pass(false);           // active-set refinement
          if (da > inner_tol) continue;
          d = pass(true);                    // re-scan for new violators
        }

        for (int k = 0; k < n; ++k) {
          if (k == j) continue;
          max_dw = std::max(max_dw, std::abs(w(k, j) - u(k)));
          w(k, j) = u(k);
          w(j, k) = u(k);
        }
      }

      Eigen::MatrixXd jcur = recover_precision(w, b);
      const double gap = std::abs(penalized_gap(s, jcur, gamma));
      residual = std::max(max_dw, gap / n);
      if (max_dw <= tol && gap <= tol * n) {
        out.J = jcur;
        converged = true;
        break;
      }
    }
    if (!converged) {
      Eigen::MatrixXd jcur = recover_precision(w, b);
      throw glasso_convergence_error(
          "glasso_precision: no convergence after " + std::to_string(max_iter) +
              " sweeps (residual " + std::to_string(residual) + ")",
          residual, max_iter, jcur);
    }
  }

  // Exact zeros outside the detected support.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(out.J(i, j)) > 1e-10) {
        out.support.emplace_back(i, j);
      } else {
        out.J(i, j) = 0.0;
        out.J(j, i) = 0.0;
      }
    }

  Eigen::LLT<Eigen::MatrixXd> check(out.J);
  if (check.info() != Eigen::Success)
    throw not_positive_definite_error(
        "glasso_precision: returned matrix failed the definiteness check");
  return out;
}

PrecisionMatrix logo_precision(const CovarianceModel& model, double gamma,
                               double cond_cap) {
  if (gamma < 0.0 || gamma > 1.0)
    throw invalid_argument_error("logo_precision: gamma must be in [0, 1]");
  const int n = model.n();
  if (n < 4) throw invalid_argument_error("logo_precision: need at least 4 variables");

  ChordalGraph graph = tmfg(model.S);

  PrecisionMatrix out;
  out.J = Eigen::MatrixXd::Zero(n, n);
  out.method = Method::logo;
  out.gamma = gamma;
  out.dense_support = false;
  out.p = model.p;
  out.tau = model.tau;

  auto local_inverse = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd loc = (1.0 - gamma) * submatrix(model.S, idx);
    loc.diagonal().array() += gamma;
    if (gamma == 0.0 && sym_condition_number(loc) > cond_cap)
      throw near_singular_error(
          "logo_precision: near-singular local covariance block at gamma = 0");
    return inverse_spd(loc, "logo_precision local block");
  };

  for (const auto& clique : graph.cliques) {
    std::vector<int> idx(clique.begin(), clique.end());
    Eigen::MatrixXd inv = local_inverse(idx);
    for (int a = 0; a < 4; ++a)
      for (int bb = 0; bb < 4; ++bb) out.J(idx[a], idx[bb]) += inv(a, bb);
  }
  for (const auto& sep : graph.separators) {
    std::vector<int> idx(sep.begin(), sep.end());
    Eigen::MatrixXd inv = local_inverse(idx);
    for (int a = 0; a < 3; ++a)
      for (int bb = 0; bb < 3; ++bb) out.J(idx[a], idx[bb]) -= inv(a, bb);
  }

  out.support = graph.edges;

  Eigen::LLT<Eigen::MatrixXd> check(out.J);
  if (check.info() != Eigen::Success)
    throw not_positive_definite_error(
        "logo_precision: assembled matrix failed the definiteness check");
  return out;
}

PrecisionMatrix estimate_precision(const CovarianceModel& model, Method method,
                                   double gamma, const EstimatorOptions& options) {
  switch (method) {
    case Method::ridge:
      return ridge_precision(model, gamma);
    case Method::glasso:
      return glasso_precision(model, gamma, options.glasso_tol,
                              options.glasso_max_iter);
    case Method::logo:
      return logo_precision(model, gamma, options.logo_cond_cap);
  }
  throw invalid_argument_error("estimate_precision: unknown method");
}

LikelihoodParts log_likelihood_parts(const PrecisionMatrix& jm,
                                     const CovarianceModel& model) {
  const int n = jm.n();
  if (model.n() != n)
    throw invalid_argument_error("log_likelihood: dimension mismatch");
  LikelihoodParts parts;
  parts.logdet_j = logdet_spd(jm.J, "log_likelihood");
  parts.trace_sj = (model.S.array() * jm.J.array()).sum();
  parts.value = 0.5 * model.q *
                (parts.logdet_j - parts.trace_sj - n * std::log(2.0 * M_PI));
  return parts;
}

double log_likelihood(const PrecisionMatrix& jm, const CovarianceModel& model) {
  return log_likelihood_parts(jm, model).value;
}

}  // namespace causnet
