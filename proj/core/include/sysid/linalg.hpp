#ifndef SYSID_LINALG_HPP
#define SYSID_LINALG_HPP

#include <span>

#include "sysid/types.hpp"

namespace sysid::linalg {

// Jitter added to sample second-moment covariances:
// max(1e-9, 1e-9 * trace / dim).
double covariance_jitter(const Matrix& second_moment);

// (1/n) sum v_i v_i^T + jitter * I. Not mean-centred. Requires n >= 1.
Matrix second_moment_covariance(std::span<const Vector> samples);

// Cholesky factor of a symmetric matrix. Retries with an escalating diagonal
// jitter (starting at 1e-12 * (1 + mean diagonal), growing 10x, at most 12
// attempts) when the plain factorization fails. Throws CalibrationError when
// every attempt fails or the matrix has non-finite entries.
Eigen::LLT<Matrix> robust_cholesky(const Matrix& symmetric);

Matrix inverse_spd(const Matrix& symmetric);

// log det through the jittered Cholesky above.
double log_det_spd(const Matrix& symmetric);

double min_eigenvalue(const Matrix& symmetric);

bool is_symmetric(const Matrix& m, double tol);

Matrix symmetrize(const Matrix& m);

}  // namespace sysid::linalg

#endif  // SYSID_LINALG_HPP
