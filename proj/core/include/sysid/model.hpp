#ifndef SYSID_MODEL_HPP
#define SYSID_MODEL_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sysid/types.hpp"

namespace sysid {

/// Black-box system g: R^{d_x} -> R^{d_y}. Queries must be deterministic and
/// re-entrant.
class SystemOracle {
 public:
  using QueryFn = std::function<Vector(const Vector&)>;

  SystemOracle(QueryFn query, int input_dim, int output_dim);

  /// Evaluates g(x). Throws DimensionError on a wrongly sized input and
  /// EvaluationError on a wrongly sized or non-finite output.
  Vector query(const Vector& x) const;

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }

 private:
  QueryFn query_;
  int input_dim_;
  int output_dim_;
};

/// Parametric family f(x; theta) with an optional analytic Jacobian
/// d f / d theta. When no Jacobian is supplied, central finite differences
/// are used.
class ParametricModel {
 public:
  using EvalFn = std::function<Vector(const Vector& x, const Vector& theta)>;
  using JacobianFn = std::function<Matrix(const Vector& x, const Vector& theta)>;

  ParametricModel(EvalFn eval, int input_dim, int output_dim, int param_dim,
                  JacobianFn jacobian = nullptr);

  Vector eval(const Vector& x, const Vector& theta) const;

  /// Analytic Jacobian when available, finite differences otherwise.
  Matrix jacobian(const Vector& x, const Vector& theta) const;

  bool has_analytic_jacobian() const { return static_cast<bool>(jacobian_); }

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  int param_dim() const { return param_dim_; }

  /// Same family with the analytic Jacobian stripped.
  ParametricModel without_jacobian() const;

 private:
  EvalFn eval_;
  JacobianFn jacobian_;
  int input_dim_;
  int output_dim_;
  int param_dim_;
};

/// Half-open range [begin, end) of input coordinates the designer controls.
struct DesignableSlice {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
};

class Dataset;

/// Produces the full-length input whose non-designable coordinates hold the
/// context (e.g. the current state) for the next query.
using ContextProvider = std::function<Vector(const Dataset&)>;

/// Ordered input-output pairs plus the description of which input
/// coordinates are designable.
class Dataset {
 public:
  Dataset(int input_dim, int output_dim, DesignableSlice slice,
          ContextProvider context = nullptr);

  /// Full designable range and zero context.
  static Dataset stateless(int input_dim, int output_dim);

  void append(Vector x, Vector y);

  std::size_t size() const { return inputs_.size(); }
  bool empty() const { return inputs_.empty(); }

  const std::vector<Vector>& inputs() const { return inputs_; }
  const std::vector<Vector>& outputs() const { return outputs_; }
  const Vector& input(std::size_t i) const { return inputs_[i]; }
  const Vector& output(std::size_t i) const { return outputs_[i]; }

  int input_dim() const { return input_dim_; }
  int output_dim() const { return output_dim_; }
  const DesignableSlice& designable() const { return slice_; }

  /// Full-length input template for the next query (zeros when stateless).
  Vector next_context() const;

  /// Writes the designable coordinates into a copy of the context.
  Vector assemble(const Vector& context, const Vector& designable) const;

  Vector designable_part(const Vector& x) const;

 private:
  int input_dim_;
  int output_dim_;
  DesignableSlice slice_;
  ContextProvider context_;
  std::vector<Vector> inputs_;
  std::vector<Vector> outputs_;
};

/// First-order expansion f(x; theta) ~= offset + sensitivity * theta around
/// expansion_point.
struct Linearization {
  Vector offset;       // b = f(x; theta_hat) - C theta_hat
  Matrix sensitivity;  // C = d f / d theta at (x, theta_hat)
  Vector expansion_point;

  Vector predict(const Vector& theta) const { return offset + sensitivity * theta; }
};

/// Default central-difference step: 1e-6 * (1 + |theta_j|) per coordinate.
Vector default_fd_steps(const Vector& theta);

/// Column j = (f(x; theta + h_j e_j) - f(x; theta - h_j e_j)) / (2 h_j).
Matrix finite_difference_jacobian(const ParametricModel& model, const Vector& x,
                                  const Vector& theta, const Vector& steps);

/// Same with a uniform step h > 0.
Matrix finite_difference_jacobian(const ParametricModel& model, const Vector& x,
                                  const Vector& theta, double h);

Linearization linearize(const ParametricModel& model, const Vector& x,
                        const Vector& theta);

std::vector<Linearization> linearize_all(const ParametricModel& model,
                                         const Dataset& data, const Vector& theta);

namespace detail {
// Throws EvaluationError naming the first non-finite coordinate.
void require_finite(const Vector& v, const std::string& what);
void require_finite(const Matrix& m, const std::string& what);
}  // namespace detail

}  // namespace sysid

#endif  // SYSID_MODEL_HPP
