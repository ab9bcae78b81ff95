#include "sysid/systems.hpp"

#include <cmath>

namespace sysid {

Dataset BenchmarkCase::make_dataset() const {
  const int dx = oracle.input_dim();
  const int dy = oracle.output_dim();
  if (!sequential) return Dataset(dx, dy, designable);

  // The state occupies the first dy input coordinates.
  const Vector start = initial_state;
  auto context = [start, dx, dy](const Dataset& data) {
    Vector ctx = Vector::Zero(dx);
    ctx.head(dy) = data.empty() ? start : data.outputs().back();
    return ctx;
  };
  return Dataset(dx, dy, designable, context);
}

namespace systems {

ParametricModel linear_family() {
  auto eval = [](const Vector& x, const Vector& t) {
    Vector y(2);
    y << t[0] * x[0] + t[1] * x[1], t[2] * x[0] + t[3] * x[1];
    return y;
  };
  auto jac = [](const Vector& x, const Vector&) {
    Matrix c(2, 4);
    c << x[0], x[1], 0.0, 0.0,
         0.0, 0.0, x[0], x[1];
    return c;
  };
  return ParametricModel(eval, 2, 2, 4, jac);
}

ParametricModel henon_family() {
  auto eval = [](const Vector& x, const Vector& t) {
    Vector y(2);
    y << 1.0 - t[0] * x[0] * x[0] + x[1], t[1] * x[0];
    return y;
  };
  auto jac = [](const Vector& x, const Vector&) {
    Matrix c(2, 2);
    c << -x[0] * x[0], 0.0,
         0.0, x[0];
    return c;
  };
  return ParametricModel(eval, 2, 2, 2, jac);
}

ParametricModel unicycle_family() {
  auto eval = [](const Vector& x, const Vector& t) {
    const double heading = x[2];
    const double u1 = x[3];
    const double u2 = x[4];
    Vector y(3);
    y << t[1] * x[0] + u1 * t[0] * std::cos(heading),
         t[1] * x[1] + u1 * t[0] * std::sin(heading),
         heading + u2 * t[0];
    return y;
  };
  auto jac = [](const Vector& x, const Vector&) {
    const double heading = x[2];
    const double u1 = x[3];
    const double u2 = x[4];
    Matrix c(3, 2);
    c << u1 * std::cos(heading), x[0],
         u1 * std::sin(heading), x[1],
         u2, 0.0;
    return c;
  };
  return ParametricModel(eval, 5, 3, 2, jac);
}

ParametricModel tied_linear_family() {
  auto eval = [](const Vector& x, const Vector& t) {
    const double v = t[0] * x[0] + t[1] * x[1];
    Vector y(2);
    y << v, v;
    return y;
  };
  auto jac = [](const Vector& x, const Vector&) {
    Matrix c(2, 2);
    c << x[0], x[1],
         x[0], x[1];
    return c;
  };
  return ParametricModel(eval, 2, 2, 2, jac);
}

Vector henon_map(const Vector& x) {
  Vector y(2);
  y << 1.0 - kHenonAlpha * x[0] * x[0] + x[1], kHenonBeta * x[0];
  return y;
}

Vector unicycle_step(const Vector& xu) {
  const double heading = xu[2];
  const double u1 = xu[3];
  const double u2 = xu[4];
  Vector y(3);
  y << xu[0] + u1 * kUnicycleDt * std::cos(heading),
       xu[1] + u1 * kUnicycleDt * std::sin(heading),
       heading + u2 * kUnicycleDt;
  return y;
}

BenchmarkCase linear_case() {
  auto g = [](const Vector& x) {
    Matrix a(2, 2);
    a << 1.0, 2.0,
         3.0, 4.0;
    return Vector(a * x);
  };
  Vector truth(4);
  truth << 1.0, 2.0, 3.0, 4.0;
  return BenchmarkCase{"linear",
                       SystemOracle(g, 2, 2),
                       linear_family(),
                       truth,
                       ConstraintSet::norm_ball(0.5),
                       false,
                       DesignableSlice{0, 2},
                       Vector()};
}

BenchmarkCase henon_case(double input_radius) {
  Vector truth(2);
  truth << kHenonAlpha, kHenonBeta;
  return BenchmarkCase{"henon",
                       SystemOracle(henon_map, 2, 2),
                       henon_family(),
                       truth,
                       ConstraintSet::norm_ball(input_radius),
                       false,
                       DesignableSlice{0, 2},
                       Vector()};
}

BenchmarkCase unicycle_case() {
  Vector truth(2);
  truth << kUnicycleDt, 1.0;
  return BenchmarkCase{"unicycle",
                       SystemOracle(unicycle_step, 5, 3),
                       unicycle_family(),
                       truth,
                       ConstraintSet::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0)),
                       true,
                       DesignableSlice{3, 5},
                       Vector::Zero(3)};
}

BenchmarkCase mismatch_tied_case(double input_radius) {
  return BenchmarkCase{"mismatch-tied",
                       SystemOracle(henon_map, 2, 2),
                       tied_linear_family(),
                       std::nullopt,
                       ConstraintSet::norm_ball(input_radius),
                       false,
                       DesignableSlice{0, 2},
                       Vector()};
}

BenchmarkCase mismatch_linear_case(double input_radius) {
  return BenchmarkCase{"mismatch-linear",
                       SystemOracle(henon_map, 2, 2),
                       linear_family(),
                       std::nullopt,
                       ConstraintSet::norm_ball(input_radius),
                       false,
                       DesignableSlice{0, 2},
                       Vector()};
}

std::vector<BenchmarkCase> mismatch_cases(double input_radius) {
  std::vector<BenchmarkCase> out;
  out.push_back(mismatch_tied_case(input_radius));
  out.push_back(mismatch_linear_case(input_radius));
  return out;
}

std::vector<std::string> case_names() {
  return {"linear", "henon", "unicycle", "mismatch-tied", "mismatch-linear"};
}

BenchmarkCase case_by_name(const std::string& name, double henon_radius) {
  if (name == "linear") return linear_case();
  if (name == "henon") return henon_case(henon_radius);
  if (name == "unicycle") return unicycle_case();
  if (name == "mismatch-tied") return mismatch_tied_case(henon_radius);
  if (name == "mismatch-linear") return mismatch_linear_case(henon_radius);
  throw ConfigError("unknown case '" + name + "'");
}

}  // namespace systems
}  // namespace sysid
