#include "sysid/input_design.hpp"

#include <cmath>
#include <limits>

#include "sysid/linalg.hpp"

namespace sysid {

Measure parse_measure(const std::string& name) {
  if (name == "log-det" || name == "logdet") return Measure::LogDet;
  if (name == "trace") return Measure::Trace;
  if (name == "min-eigenvalue" || name == "min-eig") return Measure::MinEigenvalue;
  throw ConfigError("unknown information measure '" + name + "'");
}

std::string to_string(Measure m) {
  switch (m) {
    case Measure::LogDet:
      return "log-det";
    case Measure::Trace:
      return "trace";
    case Measure::MinEigenvalue:
      return "min-eigenvalue";
  }
  return "?";
}

double evaluate_measure(Measure m, const Matrix& information) {
  if (information.size() == 0) {
    throw DimensionError("information measure of an empty matrix");
  }
  switch (m) {
    case Measure::LogDet:
      return linalg::log_det_spd(information);
    case Measure::Trace:
      return information.trace();
    case Measure::MinEigenvalue:
      return linalg::min_eigenvalue(information);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

Matrix strict_inverse(const Matrix& sigma) {
  if (sigma.rows() != sigma.cols() || !sigma.allFinite()) {
    throw CalibrationError("covariance must be a finite square matrix");
  }
  Eigen::LLT<Matrix> llt(linalg::symmetrize(sigma));
  if (llt.info() != Eigen::Success) {
    throw CalibrationError("covariance is not positive definite");
  }
  return linalg::symmetrize(llt.solve(Matrix::Identity(sigma.rows(), sigma.cols())));
}

Matrix accumulate_information(std::span<const Vector> inputs, const Vector& theta,
                              const ParametricModel& model, const Matrix& sigma_inv,
                              Matrix start) {
  for (const auto& x : inputs) {
    const Matrix c = model.jacobian(x, theta);
    start.noalias() += c.transpose() * sigma_inv * c;
  }
  return linalg::symmetrize(start);
}

}  // namespace

Matrix posterior_information(std::span<const Vector> inputs, const Vector& theta,
                             const ParametricModel& model, const Matrix& sigma,
                             const Matrix& prior_precision) {
  if (prior_precision.rows() != model.param_dim() ||
      prior_precision.cols() != model.param_dim()) {
    throw DimensionError("posterior_information: prior precision has the wrong shape");
  }
  return accumulate_information(inputs, theta, model, strict_inverse(sigma),
                                prior_precision);
}

InformationObjective make_information_objective(
    std::span<const Vector> inputs, const Vector& theta, const ParametricModel& model,
    const Matrix& sigma, const Matrix& prior_precision, Measure measure, double penalty,
    ConstraintSet input_set, ConstraintSet output_set) {
  if (!(penalty >= 0.0)) throw DimensionError("penalty weight must be non-negative");
  InformationObjective obj;
  obj.measure = measure;
  obj.prior_precision = prior_precision;
  obj.sigma_inv = linalg::inverse_spd(sigma);
  const int d = model.param_dim();
  obj.fixed_information =
      accumulate_information(inputs, theta, model, obj.sigma_inv, Matrix::Zero(d, d));
  obj.penalty = penalty;
  obj.input_set = std::move(input_set);
  obj.output_set = std::move(output_set);
  return obj;
}

Vector DesignSpace::assemble(const Vector& designable) const {
  if (designable.size() != slice.size()) {
    throw DimensionError("candidate does not match the designable dimension");
  }
  Vector x = context;
  x.segment(slice.begin, slice.size()) = designable;
  return x;
}

double design_objective(const Vector& candidate, const InformationObjective& obj,
                        const Vector& theta, const ParametricModel& model,
                        const DesignSpace& space) {
  const Vector x = space.assemble(candidate);
  const Matrix c = model.jacobian(x, theta);
  const Matrix info = linalg::symmetrize(obj.prior_precision + obj.fixed_information +
                                         c.transpose() * obj.sigma_inv * c);
  double value = evaluate_measure(obj.measure, info);
  if (obj.penalty > 0.0) {
    double violation = obj.input_set.squared_distance(candidate);
    if (obj.output_set.bounded()) {
      violation += obj.output_set.squared_distance(model.eval(x, theta));
    }
    value -= obj.penalty * violation;
  }
  return value;
}

namespace {

struct Ascent {
  Vector x;
  double value;
  bool converged = false;
  bool diverged = false;
};

// Objective that maps any evaluation failure to NaN so the ascent can treat
// it as an infeasible trial point.
double safe_objective(const Vector& candidate, const InformationObjective& obj,
                      const Vector& theta, const ParametricModel& model,
                      const DesignSpace& space) {
  try {
    return design_objective(candidate, obj, theta, model, space);
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

Ascent ascend(Vector x, const InformationObjective& obj, const Vector& theta,
              const ParametricModel& model, const DesignSpace& space,
              const DesignOptions& options) {
  const auto& set = obj.input_set;
  auto f = [&](const Vector& v) { return safe_objective(v, obj, theta, model, space); };

  Ascent a{x, f(x)};
  if (!std::isfinite(a.value)) return a;

  const auto dim = x.size();
  Vector grad(dim);
  double step = 1.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(a.x[j]));
      Vector plus = a.x;
      Vector minus = a.x;
      plus[j] += h;
      minus[j] -= h;
      grad[j] = (f(plus) - f(minus)) / (plus[j] - minus[j]);
    }
    if (!grad.allFinite()) break;
    if ((set.project(a.x + grad) - a.x).norm() < options.gradient_tolerance) {
      a.converged = true;
      break;
    }

    // Backtracking (Armijo) along the projected path.
    double trial = step;
    bool moved = false;
    while (trial > 1e-16) {
      const Vector next = set.project(a.x + trial * grad);
      const Vector d = next - a.x;
      if (d.norm() <= 1e-15 * (1.0 + a.x.norm())) break;
      const double value = f(next);
      if (std::isfinite(value) && value >= a.value + 1e-4 * grad.dot(d)) {
        a.x = next;
        a.value = value;
        moved = true;
        break;
      }
      trial *= 0.5;
    }
    if (!moved) {
      a.converged = true;
      break;
    }
    step = std::min(2.0 * trial, 1e12);
    if (a.x.norm() > options.divergence_norm) {
      a.diverged = true;
      break;
    }
  }
  return a;
}

}  // namespace

DesignResult design_input(const InformationObjective& obj, const Vector& theta,
                          const ParametricModel& model, const DesignSpace& space,
                          Rng& rng, const DesignOptions& options) {
  if (options.starts < 1) throw DimensionError("design_input: starts must be >= 1");
  if (space.context.size() != model.input_dim()) {
    throw DimensionError("design_input: context has the wrong dimension");
  }
  DesignResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < options.starts; ++s) {
    const Vector start = obj.input_set.sample(rng, space.dim());
    const auto a = ascend(start, obj, theta, model, space, options);
    best.start_points.push_back(start);
    best.start_objectives.push_back(safe_objective(start, obj, theta, model, space));
    best.diverged = best.diverged || a.diverged;
    if (std::isfinite(a.value) && a.value > best.objective) {
      best.objective = a.value;
      best.designable = a.x;
      best.best_start = s;
      best.converged = a.converged && !a.diverged;
    }
  }
  if (best.best_start < 0) {
    throw DesignError("design_input: no start produced a finite objective");
  }
  best.input = space.assemble(best.designable);
  return best;
}

}  // namespace sysid
