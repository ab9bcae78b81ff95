#ifndef SYSID_REPORT_HPP
#define SYSID_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sysid/config.hpp"
#include "sysid/experiment.hpp"

namespace sysid::report {

/// Shortest round-trippable representation ("%.17g"); "nan" for NaN.
std::string format_number(double v);

/// records.csv: seed, iter, linf_error, logdet_model_err, delta, accepted,
/// input_0..input_k, wall_ms, followed by the extension columns n_data,
/// theta_0..theta_m, cov_00, cov_01, cov_11, status.
void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);

struct RunTimes {
  std::string started;   // ISO-8601 UTC
  std::string finished;
  double elapsed_ms = 0.0;
};

/// JSON run manifest: config echo, initialization distributions, case
/// description, code version and timestamps.
void write_manifest(std::ostream& out, const ExperimentConfig& config,
                    const std::vector<RunRecord>& records, const RunTimes& times);

std::string utc_timestamp();

/// Writes mean +/- 1 std band plots for the error, log det and trust radius
/// series plus the estimate trajectory (with 2-sigma ellipses) and the
/// chosen inputs of the first seed. Returns the files written.
std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir,
                                               const std::vector<RunRecord>& records);

}  // namespace sysid::report

#endif  // SYSID_REPORT_HPP
