#include "sysid/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sysid/linalg.hpp"

namespace sysid {

namespace {

constexpr int kMaxSecularSteps = 200;
constexpr double kBoundaryTol = 1e-12;

// ||s(mu)|| and d||s||/dmu for s(mu) = -(Lambda + mu)^-1 r in the eigenbasis.
struct StepNorm {
  double norm;
  double derivative;
};

StepNorm step_norm(const Vector& eig, const Vector& r, double mu) {
  double sq = 0.0;
  double dsq = 0.0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const double denom = eig[i] + mu;
    const double ri = r[i];
    sq += ri * ri / (denom * denom);
    dsq += -2.0 * ri * ri / (denom * denom * denom);
  }
  const double n = std::sqrt(sq);
  return {n, n > 0.0 ? dsq / (2.0 * n) : 0.0};
}

}  // namespace

TrustRegionSolution solve_trust_region(const Matrix& hessian, const Vector& gradient,
                                       double radius) {
  const auto dim = gradient.size();
  if (hessian.rows() != dim || hessian.cols() != dim) {
    throw DimensionError("solve_trust_region: Hessian and gradient sizes differ");
  }
  if (!(radius > 0.0)) {
    throw DimensionError("solve_trust_region: radius must be positive");
  }
  if (!hessian.allFinite() || !gradient.allFinite()) {
    throw SolverError("solve_trust_region: non-finite problem data");
  }

  TrustRegionSolution sol;
  const double gnorm = gradient.norm();
  if (gnorm == 0.0) {
    sol.step = Vector::Zero(dim);
    return sol;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::symmetrize(hessian));
  if (es.info() != Eigen::Success) {
    throw SolverError("solve_trust_region: eigendecomposition failed");
  }
  const Matrix& q = es.eigenvectors();
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  const double zero_tol = 1e-12 * scale;
  if (es.eigenvalues().minCoeff() < -1e-8 * scale) {
    throw CalibrationError("solve_trust_region: Hessian is not positive semidefinite");
  }
  // Round-off negatives are clamped to zero.
  const Vector eig = es.eigenvalues().cwiseMax(0.0);
  const Vector r = q.transpose() * gradient;

  // Interior candidate: pseudo-inverse step, valid when r has no component
  // along the (numerical) null space.
  bool null_excited = false;
  Vector interior(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (eig[i] <= zero_tol) {
      if (std::abs(r[i]) > 1e-12 * gnorm) null_excited = true;
      interior[i] = 0.0;
    } else {
      interior[i] = -r[i] / eig[i];
    }
  }
  if (!null_excited && interior.norm() <= radius) {
    sol.step = q * interior;
    return sol;
  }

  // Boundary solution: find mu > 0 with ||s(mu)|| = radius. ||s(mu)|| is
  // strictly decreasing and ||s(gnorm / radius)|| <= radius.
  double lo = 0.0;
  double hi = gnorm / radius;
  double mu = hi;
  // Newton on phi(mu) = 1/||s|| - 1/radius, which is nearly linear in mu.
  for (int it = 0; it < kMaxSecularSteps; ++it) {
    sol.iterations = it + 1;
    const auto [norm, dnorm] = step_norm(eig, r, mu);
    const double err = norm - radius;
    if (std::abs(err) <= kBoundaryTol * radius) break;
    if (err > 0.0) {
      lo = mu;
    } else {
      hi = mu;
    }
    double next = std::numeric_limits<double>::quiet_NaN();
    if (dnorm < 0.0 && norm > 0.0) {
      const double phi = 1.0 / norm - 1.0 / radius;
      const double dphi = -dnorm / (norm * norm);
      next = mu - phi / dphi;
    }
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) {
      mu = next;
      break;
    }
    mu = next;
    if (it + 1 == kMaxSecularSteps) {
      throw SolverError("solve_trust_region: secular equation did not converge");
    }
  }

  Vector s(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s[i] = -r[i] / (eig[i] + mu);
  // Pin the step onto the sphere; the relative correction is below 1e-12.
  s *= radius / s.norm();
  sol.step = q * s;
  sol.multiplier = mu;
  sol.on_boundary = true;
  return sol;
}

}  // namespace sysid
