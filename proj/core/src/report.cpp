#include "sysid/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sysid/systems.hpp"

#ifndef SYSID_VERSION
#define SYSID_VERSION "unknown"
#endif

namespace sysid::report {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return kNaN;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw ConfigError("records.csv: bad number '" + s + "'");
  return v;
}

int count_prefixed(const std::vector<std::string>& header, const std::string& prefix) {
  int n = 0;
  for (const auto& h : header) {
    if (h.rfind(prefix, 0) == 0) ++n;
  }
  return n;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  const auto du = records.empty() ? 0 : records.front().input.size();
  const auto dt = records.empty() ? 0 : records.front().theta.size();
  out << "seed,iter,linf_error,logdet_model_err,delta,accepted";
  for (Eigen::Index k = 0; k < du; ++k) out << ",input_" << k;
  out << ",wall_ms,n_data";
  for (Eigen::Index k = 0; k < dt; ++k) out << ",theta_" << k;
  out << ",cov_00,cov_01,cov_11,status\n";
  for (const auto& r : records) {
    out << r.seed << ',' << r.iter << ',' << format_number(r.linf_error) << ','
        << format_number(r.logdet_model_err) << ',' << format_number(r.delta) << ','
        << r.accepted;
    for (Eigen::Index k = 0; k < du; ++k) out << ',' << format_number(r.input[k]);
    out << ',' << format_number(r.wall_ms) << ',' << r.n_data;
    for (Eigen::Index k = 0; k < dt; ++k) out << ',' << format_number(r.theta[k]);
    out << ',' << format_number(r.cov00) << ',' << format_number(r.cov01) << ','
        << format_number(r.cov11) << ',' << (r.failed ? "failed" : "ok") << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("records.csv: missing header");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"seed", "iter", "linf_error", "logdet_model_err", "delta",
                           "accepted", "wall_ms"}) {
    if (!col.count(need)) {
      throw ConfigError(std::string("records.csv: missing column '") + need + "'");
    }
  }
  const int du = count_prefixed(header, "input_");
  const int dt = count_prefixed(header, "theta_");
  auto opt = [&](const std::vector<std::string>& cells, const std::string& name) {
    const auto it = col.find(name);
    return it == col.end() ? kNaN : parse_double(cells.at(it->second));
  };

  std::vector<RunRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ConfigError("records.csv: row has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(header.size()));
    }
    RunRecord r;
    r.seed = std::stoi(cells[col["seed"]]);
    r.iter = std::stoi(cells[col["iter"]]);
    r.linf_error = parse_double(cells[col["linf_error"]]);
    r.logdet_model_err = parse_double(cells[col["logdet_model_err"]]);
    r.delta = parse_double(cells[col["delta"]]);
    r.accepted = std::stoi(cells[col["accepted"]]);
    r.wall_ms = parse_double(cells[col["wall_ms"]]);
    r.input.resize(du);
    for (int k = 0; k < du; ++k) r.input[k] = opt(cells, "input_" + std::to_string(k));
    r.theta.resize(dt);
    for (int k = 0; k < dt; ++k) r.theta[k] = opt(cells, "theta_" + std::to_string(k));
    if (col.count("n_data")) r.n_data = std::stoi(cells[col["n_data"]]);
    r.cov00 = opt(cells, "cov_00");
    r.cov01 = opt(cells, "cov_01");
    r.cov11 = opt(cells, "cov_11");
    if (col.count("status")) r.failed = cells[col["status"]] == "failed";
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "iter,count,linf_error_mean,linf_error_std,logdet_model_err_mean,"
         "logdet_model_err_std,delta_mean,delta_std,accepted_mean,accepted_std\n";
  for (const auto& s : summary) {
    out << s.iter << ',' << s.count;
    for (const auto* m : {&s.linf_error, &s.logdet_model_err, &s.delta, &s.accepted}) {
      out << ',' << format_number(m->mean) << ',' << format_number(m->std);
    }
    out << '\n';
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(std::ostream& out, const ExperimentConfig& config,
                    const std::vector<RunRecord>& records, const RunTimes& times) {
  using nlohmann::json;
  std::ostringstream cfg_text;
  write_config(cfg_text, config);
  json cfg = json::object();
  std::istringstream lines(cfg_text.str());
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }

  const auto bench = systems::case_by_name(config.case_name, config.henon_radius);
  json theta_true = nullptr;
  if (bench.theta_true) {
    theta_true = std::vector<double>(bench.theta_true->data(),
                                     bench.theta_true->data() + bench.theta_true->size());
  }
  int failed = 0;
  for (const auto& r : records) failed += r.failed ? 1 : 0;

  json manifest = {
      {"tool", "sysid"},
      {"version", SYSID_VERSION},
      {"config", cfg},
      {"case",
       {{"name", bench.name},
        {"input_constraint", bench.input_constraint.describe()},
        {"sequential", bench.sequential},
        {"param_dim", bench.family.param_dim()},
        {"theta_true", theta_true}}},
      {"initialization",
       {{"theta_prior", "N(0, theta_prior_std^2 I)"},
        {"sigma_prior", "s I, s ~ U[prior_scale_min, prior_scale_max]"},
        {"sigma_initial", "v I, v ~ U[sigma_init_min, sigma_init_max]"},
        {"theta_initial", "theta_prior"},
        {"initial_dataset", bench.sequential
                                ? "n0 one-step rollouts from the initial state, uniform controls"
                                : "n0 uniform draws from the input set, shared by all seeds"}}},
      {"rows", records.size()},
      {"failed_rows", failed},
      {"started", times.started},
      {"finished", times.finished},
      {"elapsed_ms", times.elapsed_ms},
  };
  out << manifest.dump(2) << '\n';
}

namespace {

// Minimal SVG line chart with an optional shaded band.
class SvgChart {
 public:
  SvgChart(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  struct Series {
    std::vector<double> x, y, lo, hi;
    std::string color;
    bool markers = false;
  };

  void add(Series s) { series_.push_back(std::move(s)); }

  void add_ellipse(double cx, double cy, const Eigen::Matrix2d& cov, std::string color) {
    ellipses_.push_back({cx, cy, cov, std::move(color)});
  }

  std::string render() const {
    double xmin = kInf, xmax = -kInf, ymin = kInf, ymax = -kInf;
    auto grow = [&](double x, double y) {
      if (!std::isfinite(x) || !std::isfinite(y)) return;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    };
    for (const auto& s : series_) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        grow(s.x[i], s.y[i]);
        if (!s.lo.empty()) grow(s.x[i], s.lo[i]);
        if (!s.hi.empty()) grow(s.x[i], s.hi[i]);
      }
    }
    for (const auto& e : ellipses_) {
      const double rx = 2.0 * std::sqrt(std::max(0.0, e.cov(0, 0)));
      const double ry = 2.0 * std::sqrt(std::max(0.0, e.cov(1, 1)));
      grow(e.cx - rx, e.cy - ry);
      grow(e.cx + rx, e.cy + ry);
    }
    if (!(xmin <= xmax)) xmin = 0, xmax = 1;
    if (!(ymin <= ymax)) ymin = 0, ymax = 1;
    if (xmax - xmin < 1e-12) xmin -= 0.5, xmax += 0.5;
    if (ymax - ymin < 1e-12) ymin -= 0.5, ymax += 0.5;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * kPlotW; };
    auto py = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * kPlotH; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
       << title_ << "</text>\n"
       << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW
       << "\" height=\"" << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double fx = xmin + (xmax - xmin) * t / 4.0;
      const double fy = ymin + (ymax - ymin) * t / 4.0;
      os << "<text x=\"" << px(fx) << "\" y=\"" << kTop + kPlotH + 16
         << "\" text-anchor=\"middle\">" << tick(fx) << "</text>\n"
         << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(fy) + 4
         << "\" text-anchor=\"end\">" << tick(fy) << "</text>\n";
    }
    os << "<text x=\"" << kLeft + kPlotW / 2 << "\" y=\"" << kHeight - 8
       << "\" text-anchor=\"middle\">" << xlabel_ << "</text>\n"
       << "<text x=\"14\" y=\"" << kTop + kPlotH / 2 << "\" text-anchor=\"middle\" "
       << "transform=\"rotate(-90 14 " << kTop + kPlotH / 2 << ")\">" << ylabel_
       << "</text>\n";

    for (const auto& e : ellipses_) {
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e.cov);
      const auto ev = es.eigenvalues().cwiseMax(0.0);
      os << "<path d=\"";
      for (int k = 0; k <= 48; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / 48.0;
        const Eigen::Vector2d p =
            es.eigenvectors() * Eigen::Vector2d(2.0 * std::sqrt(ev[0]) * std::cos(a),
                                                2.0 * std::sqrt(ev[1]) * std::sin(a));
        os << (k == 0 ? "M" : "L") << px(e.cx + p[0]) << ' ' << py(e.cy + p[1]) << ' ';
      }
      os << "Z\" fill=\"none\" stroke=\"" << e.color << "\" stroke-opacity=\"0.6\"/>\n";
    }

    for (const auto& s : series_) {
      if (!s.lo.empty() && !s.hi.empty()) {
        os << "<path d=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.hi[i])) continue;
          os << (first ? "M" : "L") << px(s.x[i]) << ' ' << py(s.hi[i]) << ' ';
          first = false;
        }
        for (std::size_t i = s.x.size(); i-- > 0;) {
          if (!std::isfinite(s.lo[i])) continue;
          os << "L" << px(s.x[i]) << ' ' << py(s.lo[i]) << ' ';
        }
        os << "Z\" fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
      }
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (std::isfinite(s.y[i])) os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      os << "\"/>\n";
      if (s.markers) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
          if (!std::isfinite(s.y[i])) continue;
          os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
             << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        }
      }
    }
    os << "</svg>\n";
    return os.str();
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kWidth = 640;
  static constexpr int kHeight = 420;
  static constexpr int kLeft = 70;
  static constexpr int kTop = 34;
  static constexpr int kPlotW = 540;
  static constexpr int kPlotH = 330;

  static std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }

  struct Ellipse {
    double cx, cy;
    Eigen::Matrix2d cov;
    std::string color;
  };

  std::string title_, xlabel_, ylabel_;
  std::vector<Series> series_;
  std::vector<Ellipse> ellipses_;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

SvgChart::Series band(const std::vector<SummaryRow>& summary,
                      MetricStats SummaryRow::*metric, bool log10_scale) {
  SvgChart::Series s;
  s.color = "#1f4e9c";
  for (const auto& row : summary) {
    const auto& m = row.*metric;
    s.x.push_back(row.iter);
    if (log10_scale) {
      constexpr double kFloor = 1e-16;
      s.y.push_back(std::log10(std::max(m.mean, kFloor)));
      s.lo.push_back(std::log10(std::max(m.mean - m.std, kFloor)));
      s.hi.push_back(std::log10(std::max(m.mean + m.std, kFloor)));
    } else {
      s.y.push_back(m.mean);
      s.lo.push_back(m.mean - m.std);
      s.hi.push_back(m.mean + m.std);
    }
  }
  return s;
}

}  // namespace

std::vector<std::filesystem::path> write_plots(const std::filesystem::path& dir,
                                               const std::vector<RunRecord>& records) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto summary = summarize(records);

  bool has_error = false;
  for (const auto& row : summary) has_error = has_error || std::isfinite(row.linf_error.mean);
  if (has_error) {
    SvgChart c("Mean parameter error (1-std band)", "iteration", "log10 ||theta - theta_true||_inf");
    c.add(band(summary, &SummaryRow::linf_error, true));
    written.push_back(dir / "error.svg");
    write_file(written.back(), c.render());
  }
  {
    SvgChart c("Mean log det of the model-error covariance (1-std band)", "iteration",
               "log det Sigma_model_error");
    c.add(band(summary, &SummaryRow::logdet_model_err, false));
    written.push_back(dir / "logdet_model_error.svg");
    write_file(written.back(), c.render());
  }
  {
    SvgChart c("Mean trust radius (1-std band)", "iteration", "delta");
    c.add(band(summary, &SummaryRow::delta, false));
    written.push_back(dir / "delta.svg");
    write_file(written.back(), c.render());
  }

  // First seed: estimate trajectory with 2-sigma ellipses and chosen inputs.
  std::vector<const RunRecord*> first;
  for (const auto& r : records) {
    if (!records.empty() && r.seed == records.front().seed && !r.failed) first.push_back(&r);
  }
  if (!first.empty() && first.front()->theta.size() >= 2) {
    SvgChart c("Estimate trajectory (theta_0, theta_1), seed " +
                   std::to_string(first.front()->seed),
               "theta_0", "theta_1");
    SvgChart::Series s;
    s.color = "#c0392b";
    s.markers = true;
    for (const auto* r : first) {
      s.x.push_back(r->theta[0]);
      s.y.push_back(r->theta[1]);
      Eigen::Matrix2d cov;
      cov << r->cov00, r->cov01, r->cov01, r->cov11;
      if (cov.allFinite()) c.add_ellipse(r->theta[0], r->theta[1], cov, "#1f4e9c");
    }
    c.add(std::move(s));
    written.push_back(dir / "trajectory.svg");
    write_file(written.back(), c.render());
  }
  if (!first.empty() && first.front()->input.size() > 0) {
    SvgChart c("Chosen inputs, seed " + std::to_string(first.front()->seed), "iteration",
               "input");
    static const char* kColors[] = {"#1f4e9c", "#c0392b", "#27ae60", "#8e44ad"};
    for (Eigen::Index k = 0; k < first.front()->input.size(); ++k) {
      SvgChart::Series s;
      s.color = kColors[k % 4];
      s.markers = true;
      for (const auto* r : first) {
        s.x.push_back(r->iter);
        s.y.push_back(r->input[k]);
      }
      c.add(std::move(s));
    }
    written.push_back(dir / "inputs.svg");
    write_file(written.back(), c.render());
  }
  return written;
}

}  // namespace sysid::report
