// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "sysid/estimator.hpp"
#include "sysid/experiment.hpp"
#include "sysid/input_design.hpp"
#include "sysid/report.hpp"
#include "sysid/systems.hpp"

using namespace sysid;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

struct TimedRun {
  std::vector<RunRecord> rows;
  double seconds = 0.0;
};

TimedRun run_case(const std::string& name) {
  ExperimentConfig c;
  c.case_name = name;
  const auto t0 = std::chrono::steady_clock::now();
  TimedRun r;
  r.rows = run_experiment(c);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<double> final_errors(const std::vector<RunRecord>& rows) {
  int last = 0;
  for (const auto& r : rows) last = std::max(last, r.iter);
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.iter == last) out.push_back(r.failed ? INFINITY : r.linf_error);
  }
  return out;
}

Outcome convergence(const TimedRun& run, double mean_tol, double each_tol, double budget) {
  const auto errs = final_errors(run.rows);
  double mean = 0.0, worst = 0.0;
  for (double e : errs) {
    mean += e;
    worst = std::max(worst, e);
  }
  mean /= static_cast<double>(errs.size());
  const bool ok = errs.size() == 30 && mean < mean_tol && worst < each_tol && run.seconds < budget;
  return {ok, fmt("mean final error %.3g, worst %.3g, %.2f s", mean, worst, run.seconds)};
}

Vector random_vector(Rng& rng, int n, double scale) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = scale * rng.uniform(-1.0, 1.0);
  return v;
}

Matrix random_spd(Rng& rng, int n, double floor) {
  Matrix a(n, n);
  for (int i = 0; i < n * n; ++i) a.data()[i] = rng.normal();
  return a * a.transpose() + floor * Matrix::Identity(n, n);
}

Outcome trust_region_oracle() {
  Rng rng(505);
  double worst_gap = 0.0, worst_kkt = 0.0, worst_radius = 0.0;
  int boundary = 0;
  for (int instance = 0; instance < 200; ++instance) {
    const int d = 1 + static_cast<int>(rng.uniform() * 6.0);
    const int dy = 1 + static_cast<int>(rng.uniform() * 3.0);
    const int n = 1 + static_cast<int>(rng.uniform() * 4.0);
    auto data = Dataset::stateless(1, dy);
    std::vector<Linearization> lin;
    for (int i = 0; i < n; ++i) {
      data.append(Vector::Zero(1), random_vector(rng, dy, 3.0));
      Linearization l;
      l.sensitivity = Matrix(dy, d);
      for (int k = 0; k < dy * d; ++k) l.sensitivity.data()[k] = rng.normal();
      l.offset = random_vector(rng, dy, 1.0);
      lin.push_back(l);
    }
    const Matrix sigma = random_spd(rng, dy, 0.1);
    GaussianBelief prior{random_vector(rng, d, 1.0),
                         rng.uniform() < 0.3 ? Matrix(Matrix::Zero(d, d)) : random_spd(rng, d, 0.0)};
    const Vector theta_hat = random_vector(rng, d, 2.0);
    const double delta = rng.uniform(0.05, 3.0);

    const auto step = map_step(data, lin, theta_hat, sigma, prior, delta);

    // Independent assembly of the quadratic.
    const Matrix si = sigma.inverse();
    Matrix h = prior.precision;
    Vector g = prior.precision * prior.mean;
    for (int i = 0; i < n; ++i) {
      h += lin[i].sensitivity.transpose() * si * lin[i].sensitivity;
      g += lin[i].sensitivity.transpose() * si * (data.output(i) - lin[i].offset);
    }
    h = 0.5 * (h + h.transpose());
    const Vector r = h * theta_hat - g;
    const Vector ref = oracle::ball_qp(h, r, delta);
    const Vector s = step.theta - theta_hat;
    worst_gap = std::max(worst_gap, oracle::quadratic(h, r, s) - oracle::quadratic(h, r, ref));
    const auto k = oracle::kkt(h, r, delta, s, step.multiplier);
    worst_kkt = std::max(worst_kkt, k.stationarity);
    worst_radius = std::max(worst_radius, k.radius_gap);
    boundary += k.interior ? 0 : 1;
  }
  const bool ok = worst_gap <= 1e-6 && worst_kkt <= 1e-6 && worst_radius <= 1e-8;
  return {ok, fmt("objective excess %.2g, KKT residual %.2g, radius gap %.2g", worst_gap,
                  worst_kkt, worst_radius) +
                  ", " + std::to_string(boundary) + "/200 on the boundary"};
}

Outcome jacobian_suite() {
  Rng rng(606);
  double worst = 0.0;
  for (const auto& model : {systems::linear_family(), systems::henon_family(),
                            systems::unicycle_family(), systems::tied_linear_family()}) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_vector(rng, model.input_dim(), 2.0);
      const Vector t = random_vector(rng, model.param_dim(), 3.0);
      const Matrix a = model.jacobian(x, t);
      const Matrix f = finite_difference_jacobian(model, x, t, default_fd_steps(t));
      for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double rel =
            std::abs(a.data()[k] - f.data()[k]) / std::max(1.0, std::abs(a.data()[k]));
        worst = std::max(worst, rel);
      }
    }
  }
  return {worst <= 1e-5, fmt("worst relative difference %.2g over 4 families x 100 points", worst)};
}

Outcome information_monotonicity() {
  Rng rng(707);
  double worst = INFINITY;
  const std::vector<ParametricModel> models{systems::linear_family(), systems::henon_family(),
                                            systems::unicycle_family(),
                                            systems::tied_linear_family()};
  for (int draw = 0; draw < 100; ++draw) {
    const auto& model = models[draw % models.size()];
    std::vector<Vector> xs;
    const int n = static_cast<int>(rng.uniform() * 6.0);
    for (int i = 0; i <= n; ++i) xs.push_back(random_vector(rng, model.input_dim(), 2.0));
    const Vector t = random_vector(rng, model.param_dim(), 2.0);
    const Matrix sigma = random_spd(rng, model.output_dim(), 0.05);
    const Matrix p = rng.uniform() * Matrix::Identity(t.size(), t.size());
    const Matrix before = posterior_information(std::span(xs).first(n), t, model, sigma, p);
    const Matrix after = posterior_information(xs, t, model, sigma, p);
    worst = std::min(worst,
                     Eigen::SelfAdjointEigenSolver<Matrix>(after - before).eigenvalues().minCoeff());
  }
  return {worst >= -1e-10, fmt("smallest eigenvalue of the increment %.3g", worst)};
}

Outcome sigma_scaling() {
  const auto bench = systems::linear_case();
  const std::vector<Vector> xs{Vector::Constant(2, 0.3), (Vector(2) << -0.1, 0.4).finished()};
  Matrix base(2, 2);
  base << 1.0, 0.3, 0.3, 0.5;
  const DesignSpace space{Vector::Zero(2), DesignableSlice{0, 2}};
  std::vector<Vector> args;
  for (double c : {0.1, 1.0, 10.0}) {
    const auto obj = make_information_objective(xs, *bench.theta_true, bench.family, c * base,
                                                Matrix::Zero(4, 4), Measure::LogDet, 100.0,
                                                bench.input_constraint);
    auto f = [&](const Vector& x) {
      return design_objective(x, obj, *bench.theta_true, bench.family, space);
    };
    // The objective is even in x, so half the disk holds every distinct value.
    args.push_back(oracle::grid_disk(f, 0.5, 50, 360, M_PI).arg);
  }
  const bool ok = args[0] == args[1] && args[1] == args[2];
  return {ok, fmt("argmax (%.4f, %.4f) at scale 1", args[1][0], args[1][1])};
}

Outcome linear_exactness() {
  Rng rng(808);
  double worst_lin = 0.0;
  for (const auto& bench : {systems::linear_case(), systems::henon_case(), systems::unicycle_case(),
                            systems::mismatch_tied_case()}) {
    const auto& model = bench.family;
    auto data = Dataset::stateless(model.input_dim(), model.output_dim());
    for (int i = 0; i < 20; ++i) {
      const Vector x = random_vector(rng, model.input_dim(), 2.0);
      data.append(x, bench.oracle.query(x));
    }
    const Vector at = random_vector(rng, model.param_dim(), 2.0);
    const auto lin = linearize_all(model, data, at);
    const auto res = compute_residuals(data, model, random_vector(rng, model.param_dim(), 20.0), lin);
    for (const auto& e : res.lin_errors) worst_lin = std::max(worst_lin, e.lpNorm<Eigen::Infinity>());
  }

  const auto bench = systems::linear_case();
  auto data = bench.make_dataset();
  for (int i = 0; i < 6; ++i) {
    const Vector x = bench.input_constraint.sample(rng, 2);
    data.append(x, bench.oracle.query(x) + random_vector(rng, 2, 0.05));
  }
  Matrix sigma(2, 2);
  sigma << 0.8, -0.2, -0.2, 0.3;
  const Vector start = random_vector(rng, 4, 1.0);
  const auto step = map_step(data, bench.family, start, sigma, GaussianBelief::uniform(4), 1e3);
  const Matrix l_inv = Eigen::LLT<Matrix>(sigma).matrixL().solve(Matrix::Identity(2, 2));
  Matrix a(12, 4);
  Vector b(12);
  for (int i = 0; i < 6; ++i) {
    a.middleRows(2 * i, 2) = l_inv * bench.family.jacobian(data.input(i), start);
    b.segment(2 * i, 2) = l_inv * data.output(i);
  }
  const double gls_err = (step.theta - oracle::least_squares(a, b)).lpNorm<Eigen::Infinity>();
  const bool ok = worst_lin <= 1e-10 && gls_err <= 1e-8 && !step.on_boundary;
  return {ok, fmt("max |eps_lin| %.2g, GLS difference %.2g", worst_lin, gls_err)};
}

std::string csv(const std::vector<RunRecord>& rows) {
  std::ostringstream out;
  report::write_records_csv(out, rows);
  return out.str();
}

Outcome determinism(const std::string& reference) {
  ExperimentConfig c;
  c.case_name = "linear";
  c.threads = 1;
  const auto again = csv(run_experiment(c));
  c.threads = 4;
  const auto threaded = csv(run_experiment(c));
  const bool ok = again == reference && threaded == reference;
  return {ok, std::to_string(reference.size()) + " bytes, reruns with 1 and 4 threads " +
                  (ok ? "identical" : "differ")};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& what, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, what.c_str(), o.detail.c_str());
    std::fflush(stdout);
  };

  TimedRun linear, henon;
  report(1, "linear convergence", [&] {
    linear = run_case("linear");
    return convergence(linear, 1e-2, 5e-2, 30.0);
  });
  report(2, "henon convergence", [&] {
    henon = run_case("henon");
    return convergence(henon, 1e-2, INFINITY, 30.0);
  });
  report(3, "unicycle convergence", [&] { return convergence(run_case("unicycle"), 5e-2, INFINITY, 60.0); });
  report(4, "mismatch diagnostic", [&] {
    const auto tied = mismatch_verdict(run_case("mismatch-tied").rows);
    const auto full = mismatch_verdict(run_case("mismatch-linear").rows);
    const auto good = mismatch_verdict(henon.rows);
    const bool ok = tied.verdict == Verdict::Inadequate && full.verdict == Verdict::Inadequate &&
                    good.verdict == Verdict::Adequate;
    return Outcome{ok, "tied " + to_string(tied.verdict) + ", linear " + to_string(full.verdict) +
                           ", henon " + to_string(good.verdict)};
  });
  report(5, "trust-region oracle", trust_region_oracle);
  report(6, "jacobian agreement", jacobian_suite);
  report(7, "information monotonicity", information_monotonicity);
  report(8, "sigma-scaling argmax", sigma_scaling);
  report(9, "linear-model exactness", linear_exactness);
  report(10, "determinism", [&] { return determinism(csv(linear.rows)); });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
