#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sysid/config.hpp"
#include "sysid/experiment.hpp"
#include "sysid/report.hpp"

namespace sysid {
namespace {

ExperimentConfig small(const std::string& name, int seeds, int iterations) {
  ExperimentConfig c;
  c.case_name = name;
  c.seeds = seeds;
  c.iterations = iterations;
  c.threads = 1;
  return c;
}

std::string records_csv(const std::vector<RunRecord>& rows) {
  std::ostringstream out;
  report::write_records_csv(out, rows);
  return out.str();
}

TEST(Experiment, OneSeedOneIterationGivesOneRow) {
  const auto rows = run_experiment(small("linear", 1, 1));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].seed, 0);
  EXPECT_EQ(rows[0].iter, 1);
  EXPECT_FALSE(rows[0].failed);
}

TEST(Experiment, RowInvariantsHoldOnEveryCase) {
  for (const auto& name : systems::case_names()) {
    const auto config = small(name, 2, 6);
    const auto bench = systems::case_by_name(name);
    const auto rows = run_experiment(config);
    ASSERT_EQ(rows.size(), 12u) << name;
    for (const auto& r : rows) {
      EXPECT_FALSE(r.failed) << name;
      EXPECT_EQ(r.n_data, config.n0 + r.iter) << name;
      EXPECT_TRUE(std::isfinite(r.logdet_model_err)) << name;
      EXPECT_TRUE(bench.input_constraint.contains(r.input, 1e-3)) << name;
      EXPECT_GT(r.delta, 0.0) << name;
      EXPECT_EQ(r.wall_ms, 0.0);
      EXPECT_EQ(std::isnan(r.linf_error), !bench.theta_true.has_value()) << name;
    }
  }
}

TEST(Experiment, RadiusNeverIncreasesAcrossCalls) {
  const auto rows = run_experiment(small("henon", 3, 10));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].seed == rows[i - 1].seed) {
      EXPECT_LE(rows[i].delta, rows[i - 1].delta);
    }
  }
}

TEST(Experiment, AlgorithmStepAppendsOnePoint) {
  const auto bench = systems::henon_case();
  const ExperimentConfig config = small("henon", 1, 1);
  Rng data_rng(1);
  const auto initial = initial_dataset(bench, 3, data_rng);
  ASSERT_EQ(initial.size(), 3u);
  Rng rng(2);
  auto state = initialize_seed(bench, initial, config, rng);
  for (std::size_t n = 3; n < 7; ++n) {
    EXPECT_EQ(state.data.size(), n);
    const auto step = run_active_step(bench, state, config, rng);
    EXPECT_EQ(state.data.size(), n + 1);
    EXPECT_EQ(state.data.inputs().back(), step.new_input);
    EXPECT_EQ(step.new_output, bench.oracle.query(step.new_input));
  }
}

TEST(Experiment, SequentialCaseStartsFromLatestState) {
  const auto bench = systems::unicycle_case();
  Rng data_rng(1);
  const auto initial = initial_dataset(bench, 3, data_rng);
  // Seed data: independent one-step rollouts from the initial state.
  for (std::size_t i = 0; i < initial.size(); ++i) {
    EXPECT_TRUE(initial.input(i).head(3).isZero());
  }
  const ExperimentConfig config = small("unicycle", 1, 1);
  Rng rng(2);
  auto state = initialize_seed(bench, initial, config, rng);
  const Vector last = state.data.outputs().back();
  const auto step = run_active_step(bench, state, config, rng);
  EXPECT_EQ(step.new_input.head(3), last);
}

TEST(Experiment, InitializationFollowsConfiguredRanges) {
  const auto bench = systems::linear_case();
  ExperimentConfig config = small("linear", 1, 1);
  Rng data_rng(1);
  const auto initial = initial_dataset(bench, 2, data_rng);
  for (int s = 0; s < 20; ++s) {
    Rng rng(s);
    const auto state = initialize_seed(bench, initial, config, rng);
    const double v = state.calibration.sigma(0, 0);
    EXPECT_GE(v, config.sigma_init_min);
    EXPECT_LE(v, config.sigma_init_max);
    EXPECT_TRUE(state.calibration.sigma.isApprox(v * Matrix::Identity(2, 2)));
    const double s_prior = 1.0 / state.prior.precision(0, 0);
    EXPECT_GE(s_prior, config.prior_scale_min - 1e-12);
    EXPECT_LE(s_prior, config.prior_scale_max + 1e-12);
    EXPECT_EQ(state.theta, state.prior.mean);
    EXPECT_EQ(state.calibration.delta, config.delta0);
  }
}

TEST(Experiment, IdenticalConfigsGiveIdenticalBytes) {
  auto config = small("henon", 4, 5);
  const auto a = records_csv(run_experiment(config));
  const auto b = records_csv(run_experiment(config));
  EXPECT_EQ(a, b);
  config.threads = 3;
  EXPECT_EQ(records_csv(run_experiment(config)), a);
  config.rng_seed += 1;
  EXPECT_NE(records_csv(run_experiment(config)), a);
}

TEST(Experiment, OracleFailureProducesFailedRows) {
  // The oracle breaks as soon as the design reaches the boundary of the ball.
  SystemOracle fragile(
      [](const Vector& x) -> Vector {
        if (x.norm() > 0.45) return Vector::Constant(2, std::nan(""));
        return Vector(x);
      },
      2, 2);
  auto good = systems::linear_case();
  BenchmarkCase bench{"fragile", fragile, good.family, std::nullopt, good.input_constraint,
                      false, good.designable, Vector()};
  auto initial = bench.make_dataset();
  initial.append(Vector::Constant(2, 0.1), Vector::Constant(2, 0.1));
  initial.append(Vector::Constant(2, -0.2), Vector::Constant(2, -0.2));
  const auto config = small("linear", 1, 4);
  const auto rows = run_seed(bench, initial, config, 0);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.failed);
    EXPECT_TRUE(std::isnan(r.logdet_model_err));
  }
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 4u);
  EXPECT_EQ(summary[0].count, 0);
  EXPECT_TRUE(std::isnan(summary[0].delta.mean));
}

RunRecord row(int seed, int iter, double logdet, double delta = 0.3) {
  RunRecord r;
  r.seed = seed;
  r.iter = iter;
  r.linf_error = 0.5;
  r.logdet_model_err = logdet;
  r.delta = delta;
  r.accepted = 2;
  r.input = Vector::Zero(2);
  r.theta = Vector::Zero(2);
  return r;
}

TEST(Summary, SingleSeedHasZeroSpread) {
  const auto summary = summarize(run_experiment(small("henon", 1, 4)));
  ASSERT_EQ(summary.size(), 4u);
  for (const auto& s : summary) {
    EXPECT_EQ(s.count, 1);
    EXPECT_EQ(s.linf_error.std, 0.0);
    EXPECT_EQ(s.logdet_model_err.std, 0.0);
    EXPECT_EQ(s.delta.std, 0.0);
  }
}

TEST(Summary, ConstantMetricsAndPopulationStd) {
  std::vector<RunRecord> rows{row(0, 1, -2.0), row(1, 1, -2.0), row(0, 2, 1.0), row(1, 2, 3.0)};
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0].logdet_model_err.mean, -2.0);
  EXPECT_EQ(summary[0].logdet_model_err.std, 0.0);
  EXPECT_EQ(summary[0].delta.mean, 0.3);
  EXPECT_EQ(summary[1].logdet_model_err.mean, 2.0);
  EXPECT_DOUBLE_EQ(summary[1].logdet_model_err.std, 1.0);
}

std::vector<RunRecord> series(const std::vector<double>& means) {
  std::vector<RunRecord> rows;
  for (std::size_t i = 0; i < means.size(); ++i) {
    rows.push_back(row(0, static_cast<int>(i) + 1, means[i]));
  }
  return rows;
}

TEST(Verdict, NeedsEightIterations) {
  EXPECT_EQ(mismatch_verdict(series({1, 2, 3, 3, 3, 3, 3})).verdict, Verdict::Unavailable);
  EXPECT_NE(mismatch_verdict(series({1, 2, 3, 3, 3, 3, 3, 3})).verdict, Verdict::Unavailable);
}

TEST(Verdict, PlateauAboveStartIsInadequate) {
  const auto rep = mismatch_verdict(series({-3, -1, 0.5, 1, 1, 1, 1.01, 1, 1, 1}));
  EXPECT_EQ(rep.verdict, Verdict::Inadequate);
  EXPECT_TRUE(rep.plateaued);
  EXPECT_TRUE(rep.above_initial);
}

TEST(Verdict, PlateauBelowStartIsAdequate) {
  const auto rep = mismatch_verdict(series({0, -10, -20, -30, -40, -41, -41, -41, -41, -41}));
  EXPECT_EQ(rep.verdict, Verdict::Adequate);
  EXPECT_FALSE(rep.above_initial);
}

TEST(Verdict, StillRisingIsAdequate) {
  const auto rep = mismatch_verdict(series({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_FALSE(rep.plateaued);
  EXPECT_EQ(rep.verdict, Verdict::Adequate);
}

TEST(Verdict, NamesRoundTrip) {
  EXPECT_EQ(to_string(Verdict::Adequate), "adequate");
  EXPECT_EQ(to_string(Verdict::Inadequate), "inadequate");
  EXPECT_EQ(to_string(Verdict::Unavailable), "unavailable");
}

TEST(Config, ParseOverridesAndComments) {
  std::istringstream in(
      "# experiment\n"
      "case = unicycle\n"
      "seeds = 4   # trailing comment\n"
      "\n"
      "measure = trace\n"
      "rng_seed = 18446744073709551615\n"
      "record_wall_time = yes\n");
  const auto c = parse_config(in);
  EXPECT_EQ(c.case_name, "unicycle");
  EXPECT_EQ(c.seeds, 4);
  EXPECT_EQ(c.measure, Measure::Trace);
  EXPECT_EQ(c.rng_seed, 18446744073709551615ull);
  EXPECT_TRUE(c.record_wall_time);
  EXPECT_EQ(c.iterations, ExperimentConfig{}.iterations);
}

TEST(Config, WriteThenParseRoundTrips) {
  ExperimentConfig c;
  c.case_name = "mismatch-tied";
  c.lambda = 12.5;
  c.delta0 = 0.125;
  c.n0 = 7;
  std::stringstream buf;
  write_config(buf, c);
  const auto back = parse_config(buf);
  std::stringstream again;
  write_config(again, back);
  EXPECT_EQ(buf.str(), again.str());
  EXPECT_EQ(back.lambda, 12.5);
  EXPECT_EQ(back.n0, 7);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  for (const char* text : {"sedes = 3\n", "seeds = three\n", "seeds = 0\n", "rho\n",
                           "case = pendulum\n", "delta0 = -1\n", "measure = det\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(
        {
          const auto c = parse_config(in);
          c.validate();
        },
        ConfigError)
        << text;
  }
}

TEST(Records, CsvRoundTrip) {
  auto rows = run_experiment(small("unicycle", 2, 3));
  rows[1].failed = true;
  rows[1].linf_error = std::nan("");
  const auto text = records_csv(rows);
  std::istringstream in(text);
  const auto back = report::read_records_csv(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].seed, rows[i].seed);
    EXPECT_EQ(back[i].iter, rows[i].iter);
    EXPECT_EQ(back[i].failed, rows[i].failed);
    EXPECT_EQ(back[i].input, rows[i].input);
    EXPECT_EQ(back[i].theta, rows[i].theta);
    EXPECT_EQ(back[i].cov01, rows[i].cov01);
    if (!rows[i].failed) {
      EXPECT_EQ(back[i].linf_error, rows[i].linf_error);
    }
  }
  EXPECT_EQ(records_csv(back), text);
}

TEST(Records, HeaderStartsWithRequiredColumns) {
  const auto text = records_csv(run_experiment(small("linear", 1, 1)));
  EXPECT_EQ(text.rfind("seed,iter,linf_error,logdet_model_err,delta,accepted,input_0,input_1,wall_ms",
                       0),
            0u);
}

TEST(Records, FormatNumberRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -1e-300, 6.02214076e23}) {
    EXPECT_EQ(std::stod(report::format_number(v)), v);
  }
  EXPECT_EQ(report::format_number(std::nan("")), "nan");
}

}  // namespace
}  // namespace sysid
