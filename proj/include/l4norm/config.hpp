#ifndef L4NORM_CONFIG_HPP
#define L4NORM_CONFIG_HPP

// Flat key=value run configuration. '#' starts a comment; blank lines are
// ignored. Later assignments override earlier ones, so command-line
// overrides are applied with the same setter as the file.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "l4norm/equilibria.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/model.hpp"
#include "l4norm/normal_modes.hpp"
#include "l4norm/report.hpp"
#include "l4norm/taylor.hpp"
#include "l4norm/verify.hpp"

namespace l4norm {

enum class OutputFormat { Csv, Report };

struct RunConfig {
  std::optional<double> mu;
  std::optional<double> q1;
  std::optional<double> epsilon;
  double A2 = 0.0;
  std::optional<double> cd;
  std::optional<double> w1;
  Branch branch = Branch::L4;
  std::set<Stage> stages{kAllStages.begin(), kAllStages.end()};
  std::map<Stage, double> tolerances;
  std::string out;
  OutputFormat format = OutputFormat::Report;
  CubicSource cubic = CubicSource::Oracle;
  std::optional<B1Reading> reading;

  /// Normalized form: one assignment per line, fixed key order, 17-digit numbers.
  std::string normalized() const;
  void set(std::string_view key, std::string_view value);
  /// Model parameters with mu replaced; the base for sweeps and scans.
  ModelParams params_at(double mu_value) const;
  ModelParams params() const;
  PipelineOptions pipeline_options() const;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || ptr != end || !std::isfinite(x)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, v));
  }
  return x;
}

inline std::set<Stage> parse_stages(std::string_view v) {
  std::set<Stage> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    const auto st = parse_stage(item);
    if (!st) {
      throw ConfigError(fmt::format("stages: unknown stage '{}' (expected equilibria, taylor, b1, b2, h3)", item));
    }
    out.insert(*st);
    v = comma == std::string_view::npos ? std::string_view{} : v.substr(comma + 1);
  }
  if (out.empty()) throw ConfigError("stages: at least one stage is required");
  return out;
}

}  // namespace detail

inline void RunConfig::set(std::string_view key, std::string_view value) {
  key = detail::trim(key);
  value = detail::trim(value);
  auto number = [&] { return detail::parse_double(key, value); };
  if (key == "mu") {
    mu = number();
  } else if (key == "q1") {
    q1 = number();
  } else if (key == "epsilon") {
    epsilon = number();
  } else if (key == "a2") {
    A2 = number();
  } else if (key == "cd") {
    cd = number();
  } else if (key == "w1") {
    w1 = number();
  } else if (key == "branch") {
    if (value == "L4") {
      branch = Branch::L4;
    } else if (value == "L5") {
      branch = Branch::L5;
    } else {
      throw ConfigError(fmt::format("branch: '{}' is not L4 or L5", value));
    }
  } else if (key == "stages") {
    stages = detail::parse_stages(value);
  } else if (key.starts_with("tol.")) {
    const auto st = parse_stage(key.substr(4));
    if (!st) throw ConfigError(fmt::format("unknown key '{}'", key));
    const double t = number();
    if (!(t > 0.0)) throw ConfigError(fmt::format("{}: tolerance must be positive", key));
    tolerances[*st] = t;
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "format") {
    if (value == "csv") {
      format = OutputFormat::Csv;
    } else if (value == "report") {
      format = OutputFormat::Report;
    } else {
      throw ConfigError(fmt::format("format: '{}' is not csv or report", value));
    }
  } else if (key == "cubic") {
    if (value == "oracle") {
      cubic = CubicSource::Oracle;
    } else if (value == "printed") {
      cubic = CubicSource::Printed;
    } else {
      throw ConfigError(fmt::format("cubic: '{}' is not oracle or printed", value));
    }
  } else if (key == "b1_reading") {
    if (value == "auto") {
      reading.reset();
    } else if (value == "consistent") {
      reading = B1Reading::Consistent;
    } else if (value == "printed") {
      reading = B1Reading::Printed;
    } else {
      throw ConfigError(fmt::format("b1_reading: '{}' is not auto, consistent or printed", value));
    }
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

inline RunConfig parse_config(std::string_view text) {
  RunConfig c;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("line {}: expected key=value, got '{}'", line_no, line));
    }
    c.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string RunConfig::normalized() const {
  std::string s;
  auto put = [&](std::string_view k, const std::string& v) { s += fmt::format("{}={}\n", k, v); };
  if (mu) put("mu", num(*mu));
  if (q1) put("q1", num(*q1));
  if (epsilon) put("epsilon", num(*epsilon));
  put("a2", num(A2));
  if (cd) put("cd", num(*cd));
  if (w1) put("w1", num(*w1));
  put("branch", std::string(to_string(branch)));
  std::string st;
  for (auto x : stages) st += (st.empty() ? "" : ",") + std::string(to_string(x));
  put("stages", st);
  for (const auto& [k, v] : tolerances) put(fmt::format("tol.{}", to_string(k)), num(v));
  if (!out.empty()) put("out", out);
  put("format", format == OutputFormat::Csv ? "csv" : "report");
  put("cubic", cubic == CubicSource::Oracle ? "oracle" : "printed");
  put("b1_reading", reading ? std::string(to_string(*reading)) : "auto");
  return s;
}

inline ModelParams RunConfig::params_at(double mu_value) const {
  std::optional<double> eps = epsilon;
  if (q1) {
    if (eps && std::abs(*eps - (1.0 - *q1)) > 1e-12) {
      throw ConfigError(fmt::format("q1 = {} and epsilon = {} disagree (epsilon = 1 - q1)", *q1, *eps));
    }
    eps = 1.0 - *q1;
  }
  const double e = eps.value_or(0.0);
  if (w1) {
    if (cd) throw ConfigError("give either cd or w1, not both (w1 = (1 - mu)(1 - q1)/cd)");
    return ModelParams::perturbed(mu_value, e, A2, *w1);
  }
  if (e > 0.0 && !cd) {
    throw ConfigError("cd is required when q1 < 1 (drag strength w1 = (1 - mu)(1 - q1)/cd), or give w1");
  }
  return ModelParams::make(mu_value, 1.0 - e, A2, cd.value_or(INFINITY));
}

inline ModelParams RunConfig::params() const {
  if (!mu) throw ConfigError("mu is required");
  return params_at(*mu);
}

inline PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions o;
  o.branch = branch;
  o.stages = stages;
  for (const auto& [k, v] : tolerances) o.tolerances[k] = v;
  o.cubic = cubic;
  o.reading = reading;
  return o;
}

}  // namespace l4norm

#endif  // L4NORM_CONFIG_HPP
