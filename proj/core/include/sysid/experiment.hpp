#ifndef SYSID_EXPERIMENT_HPP
#define SYSID_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "sysid/config.hpp"
#include "sysid/estimator.hpp"
#include "sysid/input_design.hpp"
#include "sysid/random.hpp"
#include "sysid/systems.hpp"

namespace sysid {

/// Everything carried from one active step to the next.
struct AlgorithmState {
  Dataset data;
  Vector theta;
  CalibrationState calibration;
  GaussianBelief prior;
};

struct StepReport {
  EstimationResult estimation;
  DesignResult design;
  Vector new_input;
  Vector new_output;
};

/// One active-learning step: estimation loop, input design with the
/// model-error covariance, oracle query, append. A no-accept estimation loop
/// still proceeds to design with the previous estimate.
StepReport run_active_step(const BenchmarkCase& bench, AlgorithmState& state,
                               const ExperimentConfig& config, Rng& rng);

/// n0 fixed points: uniform draws from the case's input set, or for
/// sequential systems one-step rollouts from the initial state with uniform
/// controls.
Dataset initial_dataset(const BenchmarkCase& bench, int n0, Rng& rng);

/// Draws theta_prior, Sigma_prior and the initial Sigma for one seed.
AlgorithmState initialize_seed(const BenchmarkCase& bench, const Dataset& initial,
                               const ExperimentConfig& config, Rng& rng);

struct RunRecord {
  int seed = 0;
  int iter = 0;
  double linf_error = 0.0;  // NaN without a true parameter
  double logdet_model_err = 0.0;
  double delta = 0.0;
  int accepted = 0;
  Vector input;  // chosen designable coordinates
  double wall_ms = 0.0;
  // Extensions.
  int n_data = 0;
  Vector theta;
  double cov00 = 0.0;  // posterior covariance block of (theta_0, theta_1)
  double cov01 = 0.0;
  double cov11 = 0.0;
  bool failed = false;
};

/// Runs every seed (in parallel across config.threads workers) and returns
/// rows ordered by (seed, iter). Identical configs give identical rows,
/// wall_ms aside.
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// Per-seed worker, exposed for tests.
std::vector<RunRecord> run_seed(const BenchmarkCase& bench, const Dataset& initial,
                                const ExperimentConfig& config, int seed);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation across seeds
};

struct SummaryRow {
  int iter = 0;
  int count = 0;  // successful seeds
  MetricStats linf_error;
  MetricStats logdet_model_err;
  MetricStats delta;
  MetricStats accepted;
};

/// Per-iteration mean and standard deviation across seeds. Failed rows and
/// non-finite values are skipped per metric.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

enum class Verdict { Adequate, Inadequate, Unavailable };

std::string to_string(Verdict v);

struct VerdictReport {
  Verdict verdict = Verdict::Unavailable;
  double initial = 0.0;          // mean log det at the first iteration
  double plateau = 0.0;          // mean over the last quarter
  double relative_change = 0.0;  // (max - min) / max(1, |plateau|) over the last quarter
  bool plateaued = false;
  bool above_initial = false;
};

/// Inadequate iff the mean log det of the model-error covariance has
/// plateaued (relative change below 5% across the last quarter of
/// iterations) at a value above its first-iteration value. Needs at least
/// 8 iterations.
VerdictReport mismatch_verdict(const std::vector<RunRecord>& records);

}  // namespace sysid

#endif  // SYSID_EXPERIMENT_HPP
