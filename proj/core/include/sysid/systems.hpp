#ifndef SYSID_SYSTEMS_HPP
#define SYSID_SYSTEMS_HPP

#include <optional>
#include <string>
#include <vector>

#include "sysid/constraints.hpp"
#include "sysid/model.hpp"

namespace sysid {

/// A true system paired with the model family used to identify it.
struct BenchmarkCase {
  std::string name;
  SystemOracle oracle;
  ParametricModel family;
  std::optional<Vector> theta_true;  // absent when the family is misspecified
  ConstraintSet input_constraint;    // on the designable coordinates
  bool sequential = false;
  DesignableSlice designable;
  Vector initial_state;  // sequential systems only

  /// Empty dataset carrying this case's designable slice and, for sequential
  /// systems, a context provider returning the latest state.
  Dataset make_dataset() const;
};

namespace systems {

constexpr double kHenonAlpha = 1.4;
constexpr double kHenonBeta = 0.3;
constexpr double kUnicycleDt = 0.1;
constexpr double kDefaultHenonRadius = 2.0;

/// g(x) = [[1, 2], [3, 4]] x identified with a free 2x2 matrix (row-major
/// theta), inputs bounded to the 0.5 ball.
BenchmarkCase linear_case();

/// Henon map with alpha = 1.4, beta = 0.3 and family
/// (1 - theta_1 x_1^2 + x_2, theta_2 x_1).
BenchmarkCase henon_case(double input_radius = kDefaultHenonRadius);

/// Unicycle with dt = 0.1. Input is (state x1, x2, heading, u1, u2); only the
/// controls are designable. Family scales positions by theta_2 and the
/// controls by theta_1; theta_true = (0.1, 1). Controls are boxed to [-1, 1].
BenchmarkCase unicycle_case();

/// Henon oracle with (a) the tied-row linear family [[t1, t2], [t1, t2]] x
/// and (b) the free 2x2 linear family.
std::vector<BenchmarkCase> mismatch_cases(double input_radius = kDefaultHenonRadius);

BenchmarkCase mismatch_tied_case(double input_radius = kDefaultHenonRadius);
BenchmarkCase mismatch_linear_case(double input_radius = kDefaultHenonRadius);

/// "linear", "henon", "unicycle", "mismatch-tied", "mismatch-linear".
BenchmarkCase case_by_name(const std::string& name,
                           double henon_radius = kDefaultHenonRadius);

std::vector<std::string> case_names();

/// Individual families, exposed for tests and benchmarks.
ParametricModel linear_family();
ParametricModel henon_family();
ParametricModel unicycle_family();
ParametricModel tied_linear_family();

Vector henon_map(const Vector& x);
Vector unicycle_step(const Vector& state_and_control);

}  // namespace systems
}  // namespace sysid

#endif  // SYSID_SYSTEMS_HPP
