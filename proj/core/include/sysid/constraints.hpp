#ifndef SYSID_CONSTRAINTS_HPP
#define SYSID_CONSTRAINTS_HPP

#include <string>

#include "sysid/random.hpp"
#include "sysid/types.hpp"

namespace sysid {

/// Constraint on a vector: unbounded, Euclidean ball of radius r around the
/// origin, or an axis-aligned box.
class ConstraintSet {
 public:
  enum class Kind { Unbounded, NormBall, Box };

  static ConstraintSet unbounded();
  static ConstraintSet norm_ball(double radius);
  static ConstraintSet box(Vector lo, Vector hi);

  Kind kind() const { return kind_; }
  double radius() const { return radius_; }
  const Vector& lower() const { return lo_; }
  const Vector& upper() const { return hi_; }
  bool bounded() const { return kind_ != Kind::Unbounded; }

  /// Euclidean projection onto the set (identity when unbounded).
  Vector project(const Vector& x) const;

  /// Squared Euclidean distance to the set; 0 inside.
  double squared_distance(const Vector& x) const;

  bool contains(const Vector& x, double tol = 0.0) const;

  /// Uniform draw from the set; standard normal coordinates when unbounded.
  Vector sample(Rng& rng, int dim) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::Unbounded;
  double radius_ = 0.0;
  Vector lo_;
  Vector hi_;
};

}  // namespace sysid

#endif  // SYSID_CONSTRAINTS_HPP
