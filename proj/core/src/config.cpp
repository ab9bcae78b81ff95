#include "sysid/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "sysid/systems.hpp"

namespace sysid {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ConfigError("config: invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: invalid boolean '" + value + "' for key '" + key + "'");
}

}  // namespace

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  const auto names = systems::case_names();
  require(std::find(names.begin(), names.end(), case_name) != names.end(),
          "unknown case name");
  require(seeds > 0, "seeds must be positive");
  require(iterations > 0, "iterations must be positive");
  require(inner_iters > 0, "inner_iters must be positive");
  require(delta0 > 0.0, "delta0 must be positive");
  require(delta_shrink > 0.0 && delta_shrink < 1.0, "delta_shrink must be in (0, 1)");
  require(rho > 0.0, "rho must be positive");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(n0 > 0, "n0 must be positive");
  require(design_starts > 0, "design_starts must be positive");
  require(design_max_iters > 0, "design_max_iters must be positive");
  require(theta_prior_std >= 0.0, "theta_prior_std must be non-negative");
  require(prior_scale_min > 0.0 && prior_scale_min <= prior_scale_max,
          "prior scale range must be positive and ordered");
  require(sigma_init_min > 0.0 && sigma_init_min <= sigma_init_max,
          "initial sigma range must be positive and ordered");
  require(henon_radius > 0.0, "henon_radius must be positive");
  require(threads >= 0, "threads must be non-negative");
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "case") cfg.case_name = value;
    else if (key == "seeds") cfg.seeds = parse_number<int>(key, value);
    else if (key == "iterations") cfg.iterations = parse_number<int>(key, value);
    else if (key == "inner_iters") cfg.inner_iters = parse_number<int>(key, value);
    else if (key == "delta0") cfg.delta0 = parse_number<double>(key, value);
    else if (key == "delta_shrink") cfg.delta_shrink = parse_number<double>(key, value);
    else if (key == "rho") cfg.rho = parse_number<double>(key, value);
    else if (key == "lambda") cfg.lambda = parse_number<double>(key, value);
    else if (key == "measure") cfg.measure = parse_measure(value);
    else if (key == "n0") cfg.n0 = parse_number<int>(key, value);
    else if (key == "design_starts") cfg.design_starts = parse_number<int>(key, value);
    else if (key == "design_max_iters") cfg.design_max_iters = parse_number<int>(key, value);
    else if (key == "theta_prior_std") cfg.theta_prior_std = parse_number<double>(key, value);
    else if (key == "prior_scale_min") cfg.prior_scale_min = parse_number<double>(key, value);
    else if (key == "prior_scale_max") cfg.prior_scale_max = parse_number<double>(key, value);
    else if (key == "sigma_init_min") cfg.sigma_init_min = parse_number<double>(key, value);
    else if (key == "sigma_init_max") cfg.sigma_init_max = parse_number<double>(key, value);
    else if (key == "henon_radius") cfg.henon_radius = parse_number<double>(key, value);
    else if (key == "rng_seed") cfg.rng_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threads") cfg.threads = parse_number<int>(key, value);
    else if (key == "record_wall_time") cfg.record_wall_time = parse_bool(key, value);
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "case = " << c.case_name << '\n'
     << "seeds = " << c.seeds << '\n'
     << "iterations = " << c.iterations << '\n'
     << "inner_iters = " << c.inner_iters << '\n'
     << "delta0 = " << c.delta0 << '\n'
     << "delta_shrink = " << c.delta_shrink << '\n'
     << "rho = " << c.rho << '\n'
     << "lambda = " << c.lambda << '\n'
     << "measure = " << to_string(c.measure) << '\n'
     << "n0 = " << c.n0 << '\n'
     << "design_starts = " << c.design_starts << '\n'
     << "design_max_iters = " << c.design_max_iters << '\n'
     << "theta_prior_std = " << c.theta_prior_std << '\n'
     << "prior_scale_min = " << c.prior_scale_min << '\n'
     << "prior_scale_max = " << c.prior_scale_max << '\n'
     << "sigma_init_min = " << c.sigma_init_min << '\n'
     << "sigma_init_max = " << c.sigma_init_max << '\n'
     << "henon_radius = " << c.henon_radius << '\n'
     << "rng_seed = " << c.rng_seed << '\n'
     << "threads = " << c.threads << '\n'
     << "record_wall_time = " << (c.record_wall_time ? "true" : "false") << '\n';
  out << os.str();
}

}  // namespace sysid
