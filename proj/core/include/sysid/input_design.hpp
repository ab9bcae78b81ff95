#ifndef SYSID_INPUT_DESIGN_HPP
#define SYSID_INPUT_DESIGN_HPP

#include <span>
#include <string>
#include <vector>

#include "sysid/constraints.hpp"
#include "sysid/model.hpp"
#include "sysid/random.hpp"
#include "sysid/types.hpp"

namespace sysid {

/// Scalar magnitude of an information matrix.
enum class Measure { LogDet, Trace, MinEigenvalue };

Measure parse_measure(const std::string& name);
std::string to_string(Measure m);

double evaluate_measure(Measure m, const Matrix& information);

/// P + sum_i C(x_i; theta)^T S^-1 C(x_i; theta). Throws CalibrationError if
/// sigma is not positive definite.
Matrix posterior_information(std::span<const Vector> inputs, const Vector& theta,
                             const ParametricModel& model, const Matrix& sigma,
                             const Matrix& prior_precision);

/// Everything needed to score a candidate next input.
struct InformationObjective {
  Measure measure = Measure::LogDet;
  Matrix prior_precision;
  Matrix fixed_information;  // sum over the inputs already in the dataset
  Matrix sigma_inv;
  double penalty = 100.0;  // lambda
  ConstraintSet input_set;   // on the designable coordinates
  ConstraintSet output_set;  // on f(x; theta)
};

/// Builds the objective from the current dataset. sigma is the covariance
/// used for design (the model-error covariance in the active loop); it is
/// inverted through the jittered Cholesky.
InformationObjective make_information_objective(
    std::span<const Vector> inputs, const Vector& theta, const ParametricModel& model,
    const Matrix& sigma, const Matrix& prior_precision, Measure measure, double penalty,
    ConstraintSet input_set, ConstraintSet output_set = ConstraintSet::unbounded());

/// Fixed context plus the designable slice it leaves open.
struct DesignSpace {
  Vector context;
  DesignableSlice slice;

  Vector assemble(const Vector& designable) const;
  int dim() const { return slice.size(); }
};

/// M(P + F + C^T S^-1 C at the assembled input)
///   - lambda * (sqdist(x_cand, X) + sqdist(f(x; theta), Y)).
double design_objective(const Vector& candidate, const InformationObjective& obj,
                        const Vector& theta, const ParametricModel& model,
                        const DesignSpace& space);

struct DesignOptions {
  int starts = 8;
  int max_iterations = 200;
  double gradient_tolerance = 1e-8;
  double divergence_norm = 1e6;
};

struct DesignResult {
  Vector designable;
  Vector input;  // full input with context filled in
  double objective = 0.0;
  int best_start = -1;
  bool converged = false;  // the winning start met a stopping test
  bool diverged = false;   // some start's iterate norm exceeded divergence_norm
  std::vector<Vector> start_points;
  std::vector<double> start_objectives;
};

/// Multi-start projected finite-difference gradient ascent on
/// design_objective. Ties go to the lowest start index. Throws DesignError
/// if no start yields a finite objective.
DesignResult design_input(const InformationObjective& obj, const Vector& theta,
                          const ParametricModel& model, const DesignSpace& space,
                          Rng& rng, const DesignOptions& options = {});

}  // namespace sysid

#endif  // SYSID_INPUT_DESIGN_HPP
