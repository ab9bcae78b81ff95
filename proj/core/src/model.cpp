#include "sysid/model.hpp"

#include <cmath>
#include <sstream>

namespace sysid {

namespace detail {

void require_finite(const Vector& v, const std::string& what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << what << ": non-finite value " << v[i] << " at coordinate " << i;
      throw EvaluationError(msg.str());
    }
  }
}

void require_finite(const Matrix& m, const std::string& what) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        std::ostringstream msg;
        msg << what << ": non-finite value " << m(r, c) << " at entry (" << r << ", "
            << c << ")";
        throw EvaluationError(msg.str());
      }
    }
  }
}

}  // namespace detail

namespace {

void require_dim(Eigen::Index got, int want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << ": expected dimension " << want << ", got " << got;
    throw DimensionError(msg.str());
  }
}

}  // namespace

SystemOracle::SystemOracle(QueryFn query, int input_dim, int output_dim)
    : query_(std::move(query)), input_dim_(input_dim), output_dim_(output_dim) {
  if (!query_ || input_dim <= 0 || output_dim <= 0) {
    throw DimensionError("SystemOracle: needs a query function and positive dimensions");
  }
}

Vector SystemOracle::query(const Vector& x) const {
  require_dim(x.size(), input_dim_, "oracle input");
  Vector y = query_(x);
  if (y.size() != output_dim_) {
    throw EvaluationError("oracle returned an output of the wrong dimension");
  }
  detail::require_finite(y, "oracle output");
  return y;
}

ParametricModel::ParametricModel(EvalFn eval, int input_dim, int output_dim,
                                 int param_dim, JacobianFn jacobian)
    : eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      input_dim_(input_dim),
      output_dim_(output_dim),
      param_dim_(param_dim) {
  if (!eval_ || input_dim <= 0 || output_dim <= 0 || param_dim <= 0) {
    throw DimensionError(
        "ParametricModel: needs an eval function and positive dimensions");
  }
}

Vector ParametricModel::eval(const Vector& x, const Vector& theta) const {
  require_dim(x.size(), input_dim_, "model input");
  require_dim(theta.size(), param_dim_, "model parameter");
  Vector y = eval_(x, theta);
  if (y.size() != output_dim_) {
    throw EvaluationError("model returned an output of the wrong dimension");
  }
  detail::require_finite(y, "model output");
  return y;
}

Matrix ParametricModel::jacobian(const Vector& x, const Vector& theta) const {
  if (!jacobian_) {
    return finite_difference_jacobian(*this, x, theta, default_fd_steps(theta));
  }
  require_dim(x.size(), input_dim_, "model input");
  require_dim(theta.size(), param_dim_, "model parameter");
  Matrix jac = jacobian_(x, theta);
  if (jac.rows() != output_dim_ || jac.cols() != param_dim_) {
    throw EvaluationError("model Jacobian has the wrong shape");
  }
  detail::require_finite(jac, "model Jacobian");
  return jac;
}

ParametricModel ParametricModel::without_jacobian() const {
  return ParametricModel(eval_, input_dim_, output_dim_, param_dim_);
}

Dataset::Dataset(int input_dim, int output_dim, DesignableSlice slice,
                 ContextProvider context)
    : input_dim_(input_dim),
      output_dim_(output_dim),
      slice_(slice),
      context_(std::move(context)) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw DimensionError("Dataset: dimensions must be positive");
  }
  if (slice.begin < 0 || slice.end > input_dim || slice.begin >= slice.end) {
    throw DimensionError("Dataset: designable slice must be a non-empty subrange of the input");
  }
}

Dataset Dataset::stateless(int input_dim, int output_dim) {
  return Dataset(input_dim, output_dim, DesignableSlice{0, input_dim});
}

void Dataset::append(Vector x, Vector y) {
  require_dim(x.size(), input_dim_, "dataset input");
  require_dim(y.size(), output_dim_, "dataset output");
  inputs_.push_back(std::move(x));
  outputs_.push_back(std::move(y));
}

Vector Dataset::next_context() const {
  if (!context_) return Vector::Zero(input_dim_);
  Vector ctx = context_(*this);
  require_dim(ctx.size(), input_dim_, "context");
  return ctx;
}

Vector Dataset::assemble(const Vector& context, const Vector& designable) const {
  require_dim(context.size(), input_dim_, "context");
  require_dim(designable.size(), slice_.size(), "designable input");
  Vector x = context;
  x.segment(slice_.begin, slice_.size()) = designable;
  return x;
}

Vector Dataset::designable_part(const Vector& x) const {
  require_dim(x.size(), input_dim_, "input");
  return x.segment(slice_.begin, slice_.size());
}

Vector default_fd_steps(const Vector& theta) {
  return 1e-6 * (1.0 + theta.array().abs()).matrix();
}

Matrix finite_difference_jacobian(const ParametricModel& model, const Vector& x,
                                  const Vector& theta, const Vector& steps) {
  require_dim(steps.size(), model.param_dim(), "finite-difference steps");
  Matrix jac(model.output_dim(), model.param_dim());
  Vector plus = theta;
  Vector minus = theta;
  for (int j = 0; j < model.param_dim(); ++j) {
    const double h = steps[j];
    if (!(h > 0.0)) {
      throw DimensionError("finite_difference_jacobian: step must be positive");
    }
    plus[j] = theta[j] + h;
    minus[j] = theta[j] - h;
    // Dividing by the realised step difference removes representation error in h.
    jac.col(j) = (model.eval(x, plus) - model.eval(x, minus)) / (plus[j] - minus[j]);
    plus[j] = theta[j];
    minus[j] = theta[j];
  }
  detail::require_finite(jac, "finite-difference Jacobian");
  return jac;
}

Matrix finite_difference_jacobian(const ParametricModel& model, const Vector& x,
                                  const Vector& theta, double h) {
  return finite_difference_jacobian(model, x, theta,
                                    Vector::Constant(model.param_dim(), h));
}

Linearization linearize(const ParametricModel& model, const Vector& x,
                        const Vector& theta) {
  Linearization lin;
  lin.sensitivity = model.jacobian(x, theta);
  const Vector value = model.eval(x, theta);
  lin.offset = value - lin.sensitivity * theta;
  detail::require_finite(lin.offset, "linearization offset");
  lin.expansion_point = theta;
  return lin;
}

std::vector<Linearization> linearize_all(const ParametricModel& model,
                                         const Dataset& data, const Vector& theta) {
  std::vector<Linearization> out;
  out.reserve(data.size());
  for (const auto& x : data.inputs()) out.push_back(linearize(model, x, theta));
  return out;
}

}  // namespace sysid
