// sysid: active system identification experiments from the command line.
//
//   sysid run --case linear --config cfg.txt --out results/
//   sysid plot --in results/ --out plots/
//   sysid verdict --in results/
//   sysid config --defaults

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "sysid/config.hpp"
#include "sysid/experiment.hpp"
#include "sysid/report.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<sysid::RunRecord> load_records(const fs::path& dir) {
  std::ifstream in(dir / "records.csv");
  if (!in) throw sysid::ConfigError("cannot open " + (dir / "records.csv").string());
  return sysid::report::read_records_csv(in);
}

void write_text(const fs::path& path, const auto& writer) {
  std::ofstream out(path);
  if (!out) throw sysid::ConfigError("cannot write " + path.string());
  writer(out);
}

int cmd_run(const std::string& case_name, const std::string& config_path,
            const fs::path& out_dir, std::optional<int> seeds,
            std::optional<int> iterations, std::optional<int> threads) {
  sysid::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = sysid::load_config(config_path);
  if (!case_name.empty()) cfg.case_name = case_name;
  if (seeds) cfg.seeds = *seeds;
  if (iterations) cfg.iterations = *iterations;
  if (threads) cfg.threads = *threads;
  cfg.validate();

  sysid::report::RunTimes times;
  times.started = sysid::report::utc_timestamp();
  const auto t0 = std::chrono::steady_clock::now();
  const auto records = sysid::run_experiment(cfg);
  times.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  times.finished = sysid::report::utc_timestamp();

  fs::create_directories(out_dir);
  const auto summary = sysid::summarize(records);
  write_text(out_dir / "records.csv",
             [&](std::ostream& os) { sysid::report::write_records_csv(os, records); });
  write_text(out_dir / "summary.csv",
             [&](std::ostream& os) { sysid::report::write_summary_csv(os, summary); });
  write_text(out_dir / "meta.json", [&](std::ostream& os) {
    sysid::report::write_manifest(os, cfg, records, times);
  });
  sysid::report::write_plots(out_dir, records);

  if (!summary.empty()) {
    const auto& last = summary.back();
    std::cout << "case " << cfg.case_name << ": " << cfg.seeds << " seeds x "
              << cfg.iterations << " iterations in " << times.elapsed_ms << " ms\n"
              << "final mean linf_error " << sysid::report::format_number(last.linf_error.mean)
              << ", mean logdet_model_err "
              << sysid::report::format_number(last.logdet_model_err.mean) << '\n';
  }
  std::cout << "wrote " << out_dir.string() << '\n';
  return 0;
}

int cmd_plot(const fs::path& in_dir, const fs::path& out_dir) {
  const auto records = load_records(in_dir);
  fs::create_directories(out_dir);
  write_text(out_dir / "summary.csv", [&](std::ostream& os) {
    sysid::report::write_summary_csv(os, sysid::summarize(records));
  });
  for (const auto& p : sysid::report::write_plots(out_dir, records)) {
    std::cout << p.string() << '\n';
  }
  return 0;
}

int cmd_verdict(const fs::path& in_dir) {
  const auto rep = sysid::mismatch_verdict(load_records(in_dir));
  std::cout << sysid::to_string(rep.verdict) << '\n';
  if (rep.verdict != sysid::Verdict::Unavailable) {
    std::cout << "initial logdet " << sysid::report::format_number(rep.initial)
              << ", plateau " << sysid::report::format_number(rep.plateau)
              << ", relative change " << sysid::report::format_number(rep.relative_change)
              << '\n';
  } else {
    std::cout << "need at least 8 iterations\n";
  }
  return rep.verdict == sysid::Verdict::Unavailable ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active Bayesian system identification experiments"};
  app.require_subcommand(1);

  std::string case_name, config_path, run_out;
  std::optional<int> seeds, iterations, threads;
  auto* run = app.add_subcommand("run", "Run seeded experiments for one benchmark case");
  run->add_option("--case", case_name,
                  "linear | henon | unicycle | mismatch-tied | mismatch-linear");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--seeds", seeds, "override the number of seeds");
  run->add_option("--iterations", iterations, "override the number of iterations");
  run->add_option("--threads", threads, "worker threads (0: all cores)");

  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plot", "Write summary.csv and SVG plots from records.csv");
  plot->add_option("--in", plot_in, "run directory")->required();
  plot->add_option("--out", plot_out, "plot directory")->required();

  std::string verdict_in;
  auto* verdict = app.add_subcommand("verdict", "Model-family adequacy from records.csv");
  verdict->add_option("--in", verdict_in, "run directory")->required();

  bool defaults = false;
  auto* config = app.add_subcommand("config", "Print configuration");
  config->add_flag("--defaults", defaults, "print every key with its default value");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(case_name, config_path, run_out, seeds, iterations, threads);
    if (*plot) return cmd_plot(plot_in, plot_out);
    if (*verdict) return cmd_verdict(verdict_in);
    if (*config) {
      sysid::write_config(std::cout, sysid::ExperimentConfig{});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "sysid: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
