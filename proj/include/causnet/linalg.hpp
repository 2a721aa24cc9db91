#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "causnet/errors.hpp"

namespace causnet {

// log det of a symmetric positive definite matrix via Cholesky.
// Throws not_positive_definite_error instead of returning NaN.
inline double logdet_spd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw not_positive_definite_error(std::string(what) +
                                      ": matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

// Inverse of an SPD matrix via Cholesky; throws on failure.
inline Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw not_positive_definite_error(std::string(what) +
                                      ": matrix is not positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
}

// Extract the square sub-matrix m[idx, idx].
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m,
                                 const std::vector<int>& idx) {
  Eigen::MatrixXd out(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = m(idx[r], idx[c]);
  return out;
}

// Extract the rectangular sub-matrix m[rows, cols].
inline Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m,
                                 const std::vector<int>& rows,
                                 const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

// Condition number of a small symmetric matrix from its eigenvalues.
inline double sym_condition_number(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace causnet
