#ifndef SYSID_TRUST_REGION_HPP
#define SYSID_TRUST_REGION_HPP

#include "sysid/types.hpp"

namespace sysid {

struct TrustRegionSolution {
  Vector step;            // s minimizing 0.5 s^T H s + r^T s over ||s|| <= radius
  double multiplier = 0;  // mu >= 0 with (H + mu I) s = -r
  bool on_boundary = false;
  int iterations = 0;
};

/// Solves min 0.5 s^T H s + r^T s subject to ||s||_2 <= radius for a
/// symmetric positive semidefinite H.
///
/// Works in the eigenbasis of H. If the unconstrained minimizer (the
/// pseudo-inverse step when H is singular and r lies in its range) fits in
/// the ball it is returned with mu = 0. Otherwise the secular equation
/// 1/||s(mu)|| = 1/radius is solved for mu > 0 by Newton iterations kept
/// inside a shrinking bisection bracket. Throws SolverError if the bracket
/// has not closed after 200 steps, CalibrationError if H is not PSD.
TrustRegionSolution solve_trust_region(const Matrix& hessian, const Vector& gradient,
                                       double radius);

}  // namespace sysid

#endif  // SYSID_TRUST_REGION_HPP
