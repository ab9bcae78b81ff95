#ifndef SYSID_ESTIMATOR_HPP
#define SYSID_ESTIMATOR_HPP

#include <span>
#include <vector>

#include "sysid/model.hpp"
#include "sysid/types.hpp"

namespace sysid {

/// Gaussian prior over theta stored as (mean, precision). A zero precision
/// encodes the uniform prior.
struct GaussianBelief {
  Vector mean;
  Matrix precision;

  static GaussianBelief uniform(int param_dim);
  static GaussianBelief from_covariance(Vector mean, const Matrix& covariance);

  int dim() const { return static_cast<int>(mean.size()); }
};

/// Online calibration state carried between active steps.
struct CalibrationState {
  Matrix sigma;              // noise covariance used by the MAP step
  Matrix sigma_model_error;  // second moment of y_i - f(x_i; theta)
  double delta = 0.3;        // trust radius
};

struct Residuals {
  std::vector<Vector> model_errors;  // y_i - f(x_i; theta_plus)
  std::vector<Vector> lin_errors;    // f(x_i; theta_plus) - (b_i + C_i theta_plus)

  std::size_t size() const { return model_errors.size(); }
  double mean_model_norm() const;
  double mean_lin_norm() const;
};

/// Normal equations of the linearized MAP problem:
/// H = P + sum C_i^T S^-1 C_i, g = P theta_prior + sum C_i^T S^-1 (y_i - b_i).
struct NormalEquations {
  Matrix hessian;
  Vector rhs;

  /// 0.5 theta^T H theta - g^T theta; equals the MAP objective up to a constant.
  double objective(const Vector& theta) const;
};

NormalEquations assemble_normal_equations(const Dataset& data,
                                          std::span<const Linearization> lin,
                                          const Matrix& sigma,
                                          const GaussianBelief& prior);

struct MapStep {
  Vector theta;
  double multiplier = 0.0;
  bool on_boundary = false;
  NormalEquations equations;
};

/// Exact minimizer of the linearized MAP objective inside the Euclidean ball
/// ||theta - theta_hat|| <= delta. Throws CalibrationError when sigma is not
/// positive definite.
MapStep map_step(const Dataset& data, std::span<const Linearization> lin,
                 const Vector& theta_hat, const Matrix& sigma,
                 const GaussianBelief& prior, double delta);

MapStep map_step(const Dataset& data, const ParametricModel& model,
                 const Vector& theta_hat, const Matrix& sigma,
                 const GaussianBelief& prior, double delta);

Residuals compute_residuals(const Dataset& data, const ParametricModel& model,
                            const Vector& theta_plus,
                            std::span<const Linearization> lin);

/// Sample second moment of (eps_model + eps_lin) plus jitter.
Matrix update_sigma(const Residuals& residuals);

/// Sample second moment of eps_model plus jitter.
Matrix model_error_covariance(const Residuals& residuals);

struct EstimatorOptions {
  int iterations = 10;
  double acceptance_ratio = 0.5;  // rho
  double shrink = 0.8;            // delta <- shrink * delta on rejection
  double min_step = 1e-10;        // early exit once an accepted step is shorter
};

/// True when the linearization error dominates: mean ||eps_lin|| exceeds
/// rho * mean ||eps_model|| by more than a round-off floor of
/// 1e-12 * (1 + mean ||y_i||).
bool linearization_dominates(const Residuals& residuals, const Dataset& data,
                             double acceptance_ratio);

struct EstimationResult {
  Vector theta;
  CalibrationState state;
  int accepted = 0;
  int rejected = 0;
  bool no_accept = false;
};

/// Inner repeat/until loop: trust-region MAP step, residuals, accept or
/// shrink. Rejected passes change only delta.
EstimationResult estimation_loop(const Dataset& data, const ParametricModel& model,
                                 const Vector& theta_hat, const CalibrationState& state,
                                 const GaussianBelief& prior,
                                 const EstimatorOptions& options = {});

}  // namespace sysid

#endif  // SYSID_ESTIMATOR_HPP
