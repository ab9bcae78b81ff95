#include "sysid/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <thread>

#include "sysid/linalg.hpp"

namespace sysid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream 0 feeds the shared initial dataset; seed k uses stream k + 1.
constexpr std::uint64_t kDataStream = 0;

}  // namespace

Dataset initial_dataset(const BenchmarkCase& bench, int n0, Rng& rng) {
  Dataset data = bench.make_dataset();
  const int dim = bench.designable.size();
  for (int i = 0; i < n0; ++i) {
    Vector x;
    if (bench.sequential) {
      x = Vector::Zero(bench.oracle.input_dim());
      x.head(bench.initial_state.size()) = bench.initial_state;
      x.segment(bench.designable.begin, dim) = bench.input_constraint.sample(rng, dim);
    } else {
      x = data.assemble(Vector::Zero(bench.oracle.input_dim()),
                        bench.input_constraint.sample(rng, dim));
    }
    Vector y = bench.oracle.query(x);
    data.append(std::move(x), std::move(y));
  }
  return data;
}

AlgorithmState initialize_seed(const BenchmarkCase& bench, const Dataset& initial,
                               const ExperimentConfig& config, Rng& rng) {
  const int dt = bench.family.param_dim();
  const int dy = bench.family.output_dim();
  Vector prior_mean(dt);
  for (int i = 0; i < dt; ++i) prior_mean[i] = config.theta_prior_std * rng.normal();
  const double prior_scale = rng.uniform(config.prior_scale_min, config.prior_scale_max);
  const double sigma_scale = rng.uniform(config.sigma_init_min, config.sigma_init_max);

  GaussianBelief prior{prior_mean, Matrix::Identity(dt, dt) / prior_scale};
  CalibrationState calib;
  calib.sigma = sigma_scale * Matrix::Identity(dy, dy);
  calib.sigma_model_error = calib.sigma;
  calib.delta = config.delta0;
  return AlgorithmState{initial, prior_mean, calib, prior};
}

StepReport run_active_step(const BenchmarkCase& bench, AlgorithmState& state,
                               const ExperimentConfig& config, Rng& rng) {
  if (state.data.empty()) {
    throw DimensionError("run_active_step: dataset must be non-empty");
  }
  StepReport report;
  EstimatorOptions est_opts;
  est_opts.iterations = config.inner_iters;
  est_opts.acceptance_ratio = config.rho;
  est_opts.shrink = config.delta_shrink;
  report.estimation = estimation_loop(state.data, bench.family, state.theta,
                                      state.calibration, state.prior, est_opts);
  state.theta = report.estimation.theta;
  state.calibration = report.estimation.state;

  const auto objective = make_information_objective(
      state.data.inputs(), state.theta, bench.family,
      state.calibration.sigma_model_error, state.prior.precision, config.measure,
      config.lambda, bench.input_constraint);
  const DesignSpace space{state.data.next_context(), bench.designable};
  DesignOptions design_opts;
  design_opts.starts = config.design_starts;
  design_opts.max_iterations = config.design_max_iters;
  report.design = design_input(objective, state.theta, bench.family, space, rng, design_opts);

  report.new_input = report.design.input;
  report.new_output = bench.oracle.query(report.new_input);
  state.data.append(report.new_input, report.new_output);
  return report;
}

std::vector<RunRecord> run_seed(const BenchmarkCase& bench, const Dataset& initial,
                                const ExperimentConfig& config, int seed) {
  using Clock = std::chrono::steady_clock;
  std::vector<RunRecord> rows;
  rows.reserve(config.iterations);
  Rng rng(config.rng_seed, static_cast<std::uint64_t>(seed) + 1);
  const int dt = bench.family.param_dim();
  const int du = bench.designable.size();

  auto failed_row = [&](int iter) {
    RunRecord r;
    r.seed = seed;
    r.iter = iter;
    r.linf_error = kNaN;
    r.logdet_model_err = kNaN;
    r.delta = kNaN;
    r.input = Vector::Constant(du, kNaN);
    r.theta = Vector::Constant(dt, kNaN);
    r.cov00 = r.cov01 = r.cov11 = kNaN;
    r.failed = true;
    return r;
  };

  std::optional<AlgorithmState> state;
  try {
    state = initialize_seed(bench, initial, config, rng);
  } catch (const Error&) {
    for (int it = 1; it <= config.iterations; ++it) rows.push_back(failed_row(it));
    return rows;
  }

  for (int it = 1; it <= config.iterations; ++it) {
    const auto t0 = Clock::now();
    try {
      const auto step = run_active_step(bench, *state, config, rng);
      RunRecord r;
      r.seed = seed;
      r.iter = it;
      r.linf_error = bench.theta_true
                         ? (state->theta - *bench.theta_true).lpNorm<Eigen::Infinity>()
                         : kNaN;
      r.logdet_model_err = linalg::log_det_spd(state->calibration.sigma_model_error);
      r.delta = state->calibration.delta;
      r.accepted = step.estimation.accepted;
      r.input = step.design.designable;
      r.n_data = static_cast<int>(state->data.size());
      r.theta = state->theta;
      const Matrix info =
          posterior_information(state->data.inputs(), state->theta, bench.family,
                                state->calibration.sigma, state->prior.precision);
      const Matrix cov = linalg::inverse_spd(info);
      r.cov00 = cov(0, 0);
      r.cov01 = dt > 1 ? cov(0, 1) : 0.0;
      r.cov11 = dt > 1 ? cov(1, 1) : 0.0;
      if (config.record_wall_time) {
        r.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
      }
      rows.push_back(std::move(r));
    } catch (const Error&) {
      for (int rest = it; rest <= config.iterations; ++rest) rows.push_back(failed_row(rest));
      break;
    }
  }
  return rows;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto bench = systems::case_by_name(config.case_name, config.henon_radius);
  Rng data_rng(config.rng_seed, kDataStream);
  const Dataset initial = initial_dataset(bench, config.n0, data_rng);

  std::vector<std::vector<RunRecord>> per_seed(config.seeds);
  int workers = config.threads > 0 ? config.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, config.seeds);

  std::atomic<int> next{0};
  auto work = [&] {
    for (int s = next.fetch_add(1); s < config.seeds; s = next.fetch_add(1)) {
      per_seed[s] = run_seed(bench, initial, config, s);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }

  std::vector<RunRecord> out;
  out.reserve(static_cast<std::size_t>(config.seeds) * config.iterations);
  for (auto& rows : per_seed) {
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

namespace {

struct Accumulator {
  std::vector<double> values;

  void add(double v) {
    if (std::isfinite(v)) values.push_back(v);
  }

  MetricStats stats() const {
    if (values.empty()) return {kNaN, kNaN};
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return {mean, std::sqrt(var)};
  }
};

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
  struct Group {
    int count = 0;
    Accumulator linf, logdet, delta, accepted;
  };
  std::map<int, Group> groups;
  for (const auto& r : records) {
    auto& g = groups[r.iter];
    if (r.failed) continue;
    ++g.count;
    g.linf.add(r.linf_error);
    g.logdet.add(r.logdet_model_err);
    g.delta.add(r.delta);
    g.accepted.add(static_cast<double>(r.accepted));
  }
  std::vector<SummaryRow> out;
  out.reserve(groups.size());
  for (const auto& [iter, g] : groups) {
    out.push_back({iter, g.count, g.linf.stats(), g.logdet.stats(), g.delta.stats(),
                   g.accepted.stats()});
  }
  return out;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Adequate:
      return "adequate";
    case Verdict::Inadequate:
      return "inadequate";
    case Verdict::Unavailable:
      return "unavailable";
  }
  return "?";
}

VerdictReport mismatch_verdict(const std::vector<RunRecord>& records) {
  VerdictReport rep;
  std::vector<double> series;
  for (const auto& row : summarize(records)) {
    if (std::isfinite(row.logdet_model_err.mean)) series.push_back(row.logdet_model_err.mean);
  }
  const auto total = static_cast<int>(series.size());
  if (total < 8) return rep;

  const int window = (total + 3) / 4;
  const auto tail = std::span<const double>(series).last(window);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  double plateau = 0.0;
  for (double v : tail) plateau += v;
  plateau /= window;

  rep.initial = series.front();
  rep.plateau = plateau;
  rep.relative_change = (*hi - *lo) / std::max(1.0, std::abs(plateau));
  rep.plateaued = rep.relative_change < 0.05;
  rep.above_initial = plateau > rep.initial + 1e-6 * std::max(1.0, std::abs(rep.initial));
  rep.verdict = rep.plateaued && rep.above_initial ? Verdict::Inadequate : Verdict::Adequate;
  return rep;
}

}  // namespace sysid
