#ifndef SYSID_CONFIG_HPP
#define SYSID_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

#include "sysid/input_design.hpp"

namespace sysid {

/// Seeded description of an experiment. Every field has a key of the same
/// name in the key-value config format.
struct ExperimentConfig {
  std::string case_name = "linear";
  int seeds = 30;
  int iterations = 30;   // outer active steps per seed
  int inner_iters = 10;  // estimation passes per call
  double delta0 = 0.3;
  double delta_shrink = 0.8;
  double rho = 0.5;
  double lambda = 100.0;
  Measure measure = Measure::LogDet;
  int n0 = 2;
  int design_starts = 8;
  int design_max_iters = 200;
  double theta_prior_std = 1.0;     // theta_prior ~ N(0, std^2 I)
  double prior_scale_min = 0.5;     // Sigma_prior = s I, s ~ U[min, max]
  double prior_scale_max = 5.0;
  double sigma_init_min = 0.1;      // initial Sigma = v I, v ~ U[min, max]
  double sigma_init_max = 1.0;
  double henon_radius = 2.0;        // input ball for the Henon-oracle cases
  std::uint64_t rng_seed = 20240607;
  int threads = 0;                  // 0: hardware concurrency
  bool record_wall_time = false;    // when false, wall_ms is written as 0

  /// Throws ConfigError describing the first invalid field.
  void validate() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys and
/// malformed values throw ConfigError.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

/// Writes every field in the format parse_config accepts.
void write_config(std::ostream& out, const ExperimentConfig& config);

}  // namespace sysid

#endif  // SYSID_CONFIG_HPP
