#include "sysid/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sysid::linalg {

double covariance_jitter(const Matrix& second_moment) {
  const double dim = static_cast<double>(second_moment.rows());
  return std::max(1e-9, 1e-9 * second_moment.trace() / dim);
}

Matrix second_moment_covariance(std::span<const Vector> samples) {
  if (samples.empty()) {
    throw DimensionError("second_moment_covariance: need at least one sample");
  }
  const auto dim = samples.front().size();
  Matrix acc = Matrix::Zero(dim, dim);
  for (const auto& v : samples) {
    if (v.size() != dim) {
      throw DimensionError("second_moment_covariance: inconsistent sample dimension");
    }
    acc.noalias() += v * v.transpose();
  }
  acc /= static_cast<double>(samples.size());
  acc = symmetrize(acc);
  acc.diagonal().array() += covariance_jitter(acc);
  return acc;
}

Eigen::LLT<Matrix> robust_cholesky(const Matrix& symmetric) {
  if (!symmetric.allFinite()) {
    throw CalibrationError("cholesky: matrix has non-finite entries");
  }
  Eigen::LLT<Matrix> llt(symmetric);
  if (llt.info() == Eigen::Success) return llt;

  const double scale = 1.0 + symmetric.diagonal().cwiseAbs().mean();
  double jitter = 1e-12 * scale;
  for (int attempt = 0; attempt < 12; ++attempt, jitter *= 10.0) {
    Matrix shifted = symmetric;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw CalibrationError("cholesky: matrix is not positive definite");
}

Matrix inverse_spd(const Matrix& symmetric) {
  const auto llt = robust_cholesky(symmetric);
  return symmetrize(llt.solve(Matrix::Identity(symmetric.rows(), symmetric.cols())));
}

double log_det_spd(const Matrix& symmetric) {
  const auto llt = robust_cholesky(symmetric);
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) {
    throw DimensionError("min_eigenvalue: empty matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace sysid::linalg
