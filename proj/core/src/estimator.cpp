#include "sysid/estimator.hpp"

#include "sysid/linalg.hpp"
#include "sysid/trust_region.hpp"

namespace sysid {

namespace {

Matrix strict_inverse(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || !sigma.allFinite()) {
    throw CalibrationError("noise covariance must be a finite square matrix");
  }
  Eigen::LLT<Matrix> llt(linalg::symmetrize(sigma));
  if (llt.info() != Eigen::Success) {
    throw CalibrationError("noise covariance is not positive definite");
  }
  return linalg::symmetrize(llt.solve(Matrix::Identity(sigma.rows(), sigma.cols())));
}

double mean_norm(const std::vector<Vector>& vs) {
  if (vs.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& v : vs) acc += v.norm();
  return acc / static_cast<double>(vs.size());
}

}  // namespace

GaussianBelief GaussianBelief::uniform(int param_dim) {
  return {Vector::Zero(param_dim), Matrix::Zero(param_dim, param_dim)};
}

GaussianBelief GaussianBelief::from_covariance(Vector mean, const Matrix& covariance) {
  return {std::move(mean), linalg::inverse_spd(covariance)};
}

double Residuals::mean_model_norm() const { return mean_norm(model_errors); }
double Residuals::mean_lin_norm() const { return mean_norm(lin_errors); }

double NormalEquations::objective(const Vector& theta) const {
  return 0.5 * theta.dot(hessian * theta) - rhs.dot(theta);
}

NormalEquations assemble_normal_equations(const Dataset& data,
                                          std::span<const Linearization> lin,
                                          const Matrix& sigma,
                                          const GaussianBelief& prior) {
  if (lin.size() != data.size()) {
    throw DimensionError("one linearization per data point is required");
  }
  const Matrix sigma_inv = strict_inverse(sigma);
  NormalEquations eq;
  eq.hessian = prior.precision;
  eq.rhs = prior.precision * prior.mean;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Matrix weighted = lin[i].sensitivity.transpose() * sigma_inv;
    eq.hessian.noalias() += weighted * lin[i].sensitivity;
    eq.rhs.noalias() += weighted * (data.output(i) - lin[i].offset);
  }
  eq.hessian = linalg::symmetrize(eq.hessian);
  return eq;
}

MapStep map_step(const Dataset& data, std::span<const Linearization> lin,
                 const Vector& theta_hat, const Matrix& sigma,
                 const GaussianBelief& prior, double delta) {
  if (prior.dim() != theta_hat.size()) {
    throw DimensionError("map_step: prior and estimate dimensions differ");
  }
  MapStep out;
  out.equations = assemble_normal_equations(data, lin, sigma, prior);
  const Vector gradient = out.equations.hessian * theta_hat - out.equations.rhs;
  const auto tr = solve_trust_region(out.equations.hessian, gradient, delta);
  out.theta = theta_hat + tr.step;
  out.multiplier = tr.multiplier;
  out.on_boundary = tr.on_boundary;
  return out;
}

MapStep map_step(const Dataset& data, const ParametricModel& model,
                 const Vector& theta_hat, const Matrix& sigma,
                 const GaussianBelief& prior, double delta) {
  const auto lin = linearize_all(model, data, theta_hat);
  return map_step(data, lin, theta_hat, sigma, prior, delta);
}

Residuals compute_residuals(const Dataset& data, const ParametricModel& model,
                            const Vector& theta_plus,
                            std::span<const Linearization> lin) {
  if (lin.size() != data.size()) {
    throw DimensionError("compute_residuals: one linearization per data point is required");
  }
  Residuals res;
  res.model_errors.reserve(data.size());
  res.lin_errors.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Vector fitted = model.eval(data.input(i), theta_plus);
    res.model_errors.push_back(data.output(i) - fitted);
    res.lin_errors.push_back(fitted - lin[i].predict(theta_plus));
  }
  return res;
}

Matrix update_sigma(const Residuals& residuals) {
  std::vector<Vector> total;
  total.reserve(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    total.push_back(residuals.model_errors[i] + residuals.lin_errors[i]);
  }
  return linalg::second_moment_covariance(total);
}

Matrix model_error_covariance(const Residuals& residuals) {
  return linalg::second_moment_covariance(residuals.model_errors);
}

bool linearization_dominates(const Residuals& residuals, const Dataset& data,
                             double acceptance_ratio) {
  double output_scale = 0.0;
  for (const auto& y : data.outputs()) output_scale += y.norm();
  if (!data.empty()) output_scale /= static_cast<double>(data.size());
  const double floor = 1e-12 * (1.0 + output_scale);
  const double lin = residuals.mean_lin_norm();
  return lin > acceptance_ratio * residuals.mean_model_norm() && lin > floor;
}

EstimationResult estimation_loop(const Dataset& data, const ParametricModel& model,
                                 const Vector& theta_hat, const CalibrationState& state,
                                 const GaussianBelief& prior,
                                 const EstimatorOptions& options) {
  if (options.iterations < 1) {
    throw DimensionError("estimation_loop: at least one iteration is required");
  }
  if (data.empty()) {
    throw DimensionError("estimation_loop: dataset is empty");
  }
  EstimationResult out{theta_hat, state, 0, 0, false};
  for (int pass = 0; pass < options.iterations; ++pass) {
    const auto lin = linearize_all(model, data, out.theta);
    const auto step = map_step(data, lin, out.theta, out.state.sigma, prior, out.state.delta);
    const auto residuals = compute_residuals(data, model, step.theta, lin);

    if (linearization_dominates(residuals, data, options.acceptance_ratio)) {
      out.state.delta *= options.shrink;
      ++out.rejected;
      continue;
    }
    out.state.sigma = update_sigma(residuals);
    out.state.sigma_model_error = model_error_covariance(residuals);
    const double moved = (step.theta - out.theta).norm();
    out.theta = step.theta;
    ++out.accepted;
    if (moved < options.min_step) break;
  }
  out.no_accept = out.accepted == 0;
  return out;
}

}  // namespace sysid
