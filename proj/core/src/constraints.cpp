#include "sysid/constraints.hpp"

#include <cmath>
#include <sstream>

namespace sysid {

ConstraintSet ConstraintSet::unbounded() { return ConstraintSet{}; }

ConstraintSet ConstraintSet::norm_ball(double radius) {
  if (!(radius > 0.0)) throw DimensionError("norm_ball: radius must be positive");
  ConstraintSet c;
  c.kind_ = Kind::NormBall;
  c.radius_ = radius;
  return c;
}

ConstraintSet ConstraintSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw DimensionError("box: bounds must be non-empty and of equal length");
  }
  if (!(lo.array() < hi.array()).all()) {
    throw DimensionError("box: lower bounds must be strictly below upper bounds");
  }
  ConstraintSet c;
  c.kind_ = Kind::Box;
  c.lo_ = std::move(lo);
  c.hi_ = std::move(hi);
  return c;
}

Vector ConstraintSet::project(const Vector& x) const {
  switch (kind_) {
    case Kind::Unbounded:
      return x;
    case Kind::NormBall: {
      const double n = x.norm();
      return n <= radius_ ? x : Vector(x * (radius_ / n));
    }
    case Kind::Box:
      if (x.size() != lo_.size()) throw DimensionError("box: dimension mismatch");
      return x.cwiseMax(lo_).cwiseMin(hi_);
  }
  return x;
}

double ConstraintSet::squared_distance(const Vector& x) const {
  switch (kind_) {
    case Kind::Unbounded:
      return 0.0;
    case Kind::NormBall: {
      const double excess = std::max(0.0, x.norm() - radius_);
      return excess * excess;
    }
    case Kind::Box:
      return (x - project(x)).squaredNorm();
  }
  return 0.0;
}

bool ConstraintSet::contains(const Vector& x, double tol) const {
  return std::sqrt(squared_distance(x)) <= tol;
}

Vector ConstraintSet::sample(Rng& rng, int dim) const {
  Vector v(dim);
  switch (kind_) {
    case Kind::Unbounded:
      for (int i = 0; i < dim; ++i) v[i] = rng.normal();
      return v;
    case Kind::NormBall: {
      for (int i = 0; i < dim; ++i) v[i] = rng.normal();
      const double n = v.norm();
      const double r = radius_ * std::pow(rng.uniform(), 1.0 / dim);
      return n > 0.0 ? Vector(v * (r / n)) : Vector(Vector::Zero(dim));
    }
    case Kind::Box:
      if (dim != lo_.size()) throw DimensionError("box: dimension mismatch");
      for (int i = 0; i < dim; ++i) v[i] = rng.uniform(lo_[i], hi_[i]);
      return v;
  }
  return v;
}

std::string ConstraintSet::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Unbounded:
      os << "unbounded";
      break;
    case Kind::NormBall:
      os << "norm-ball(" << radius_ << ")";
      break;
    case Kind::Box:
      os << "box([" << lo_.transpose() << "], [" << hi_.transpose() << "])";
      break;
  }
  return os.str();
}

}  // namespace sysid
