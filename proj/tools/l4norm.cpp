// Command-line front end. Exit codes: 0 success, 2 configuration or solver
// failure, 3 verification gate failure, 4 typed error inside the pipeline.

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "l4norm/l4norm.hpp"

namespace {

using namespace l4norm;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGate = 3;
constexpr int kExitTyped = 4;

/// Raised by a command to leave with a given exit code and message.
struct Exit {
  int code;
  std::string message;
};

struct Overrides {
  std::string config;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::string> values;
  std::vector<std::string> tols;
};

void add_config_options(CLI::App& app, Overrides& ov) {
  app.add_option("--config", ov.config, "key=value config file; flags override it");
  const std::vector<std::pair<std::string, std::string>> flags{
      {"mu", "mass ratio, 0 < mu <= 1/2"},
      {"q1", "mass-reduction factor of the radiating primary"},
      {"epsilon", "1 - q1"},
      {"a2", "oblateness of the smaller primary"},
      {"cd", "dimensionless speed of light"},
      {"w1", "drag strength, instead of cd"},
      {"branch", "L4 or L5"},
      {"stages", "comma-separated subset of equilibria,taylor,b1,b2,h3"},
      {"out", "output path prefix; stdout when absent"},
      {"format", "csv or report"},
      {"cubic", "oracle or printed cubic Lagrangian"},
      {"b1-reading", "auto, consistent or printed"},
  };
  ov.values.resize(flags.size());
  for (std::size_t i = 0; i < flags.size(); ++i) {
    auto* opt = app.add_option("--" + flags[i].first, ov.values[i], flags[i].second);
    ov.options.emplace_back(flags[i].first == "b1-reading" ? "b1_reading" : flags[i].first, opt);
  }
  app.add_option("--tol", ov.tols, "per-stage tolerance, stage=value (repeatable)");
}

RunConfig resolve_config(const Overrides& ov) {
  RunConfig cfg = ov.config.empty() ? RunConfig{} : load_config(ov.config);
  for (std::size_t i = 0; i < ov.options.size(); ++i) {
    if (ov.options[i].second->count() > 0) cfg.set(ov.options[i].first, ov.values[i]);
  }
  for (const auto& t : ov.tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--tol: expected stage=value, got '{}'", t));
    cfg.set("tol." + t.substr(0, eq), t.substr(eq + 1));
  }
  return cfg;
}

/// Writes to <prefix>_<name>.<ext>, or to stdout without a prefix.
void emit(const RunConfig& cfg, const std::string& name, const std::string& ext,
          const std::function<void(std::ostream&)>& body) {
  if (cfg.out.empty()) {
    body(std::cout);
    return;
  }
  const auto path = fmt::format("{}_{}.{}", cfg.out, name, ext);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot write '{}'", path));
  body(f);
}

void print_warnings(const ModelParams& p) {
  for (const auto& w : p.warnings()) std::cerr << "warning: " << w << '\n';
}

ModelParams checked_params(const RunConfig& cfg) {
  try {
    return cfg.params();
  } catch (const Error& e) {
    throw Exit{kExitConfig, fmt::format("error: {}: {}", to_string(e.kind()), e.what())};
  }
}

int cmd_equilibria(const RunConfig& cfg) {
  const auto p = checked_params(cfg);
  print_warnings(p);
  PipelineOptions o = cfg.pipeline_options();
  PipelineState st;
  StageReport s;
  try {
    s = detail::equilibria_stage(p, o, st);
  } catch (const Error& e) {
    throw Exit{kExitConfig, fmt::format("error: {}: {}", to_string(e.kind()), e.what())};
  }
  emit(cfg, "equilibria", "csv", [&](std::ostream& os) { s.tables.front().write(os); });
  return kExitOk;
}

int cmd_frequencies(const RunConfig& cfg) {
  const auto p = checked_params(cfg);
  print_warnings(p);
  const auto root = solve_triangular_numeric(p, cfg.branch);
  const auto q = extract_EFG(taylor_lagrangian(p, OriginShift::from_point(root, p), 2).slice(2), p);
  CsvBlock t{"frequencies", {"mu", "omega1", "omega2", "stability", "moser_min", "k1", "k2"}, {}};
  const auto w = frequencies(p, q);
  const auto m = moser_check(w);
  t.rows.push_back({num(p.mu()), num(w.omega1), num(w.omega2),
                    std::string(to_string(classify_linear_stability(q))), num(m.min_combination),
                    std::to_string(m.k1), std::to_string(m.k2)});
  for (const auto& msg : frequency_warnings(w)) std::cerr << "warning: " << msg << '\n';
  emit(cfg, "frequencies", "csv", [&](std::ostream& os) { t.write(os); });
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const auto p = checked_params(cfg);
  print_warnings(p);
  const auto report = run_pipeline(p, cfg.pipeline_options());
  if (cfg.format == OutputFormat::Report) {
    emit(cfg, "verify", "txt", [&](std::ostream& os) { report.write(os); });
  } else {
    for (const auto& s : report.stages) {
      for (const auto& t : s.tables) {
        if (cfg.out.empty()) {
          std::cout << "# " << s.stage << '.' << t.name << '\n';
          t.write(std::cout);
          std::cout << '\n';
        } else {
          emit(cfg, s.stage + "_" + t.name, "csv", [&](std::ostream& os) { t.write(os); });
        }
      }
    }
  }
  if (const auto stage = report.first_failing_stage()) {
    throw Exit{kExitGate, fmt::format("gate failure: first failing stage: {}", *stage)};
  }
  return kExitOk;
}

struct Range {
  double mu_min = 0.001;
  double mu_max = 0.038;
  int steps = 400;
};

void check_range(const Range& r) {
  if (!(r.mu_min > 0.0) || !(r.mu_max <= 0.5) || r.steps < 0) {
    throw Exit{kExitConfig, fmt::format("error: Config: range [{}, {}] with {} steps must lie in (0, 1/2], steps >= 0",
                                        r.mu_min, r.mu_max, r.steps)};
  }
}

int cmd_resonance_scan(const RunConfig& cfg, const Range& r) {
  check_range(r);
  const ParamsAt at = [&](double mu) { return cfg.params_at(mu); };
  ScanResult s;
  try {
    s = resonance_scan(at, r.mu_min, r.mu_max, r.steps);
  } catch (const Error& e) {
    throw Exit{kExitConfig, fmt::format("error: {}: {}", to_string(e.kind()), e.what())};
  }
  CsvBlock t{"resonance_scan", {"mu", "omega1", "omega2", "min_combination", "worst_pair", "pass"}, {}};
  for (const auto& row : s.rows) {
    if (!row.stable) {
      t.rows.push_back({num(row.mu), "", "", "", "", "unstable"});
      continue;
    }
    t.rows.push_back({num(row.mu), num(row.w.omega1), num(row.w.omega2), num(row.moser.min_combination),
                      fmt::format("{}:{}", row.moser.k1, row.moser.k2), row.moser.pass ? "true" : "false"});
  }
  CsvBlock c{"crossings", {"k1", "k2", "mu", "omega1", "omega2"}, {}};
  for (const auto& x : s.crossings) {
    c.rows.push_back({std::to_string(x.k1), std::to_string(x.k2), num(x.mu), num(x.w.omega1), num(x.w.omega2)});
    std::cerr << fmt::format("resonance {} omega1 + ({}) omega2 = 0 at mu = {}\n", x.k1, x.k2, num(x.mu));
  }
  if (s.any_unstable) std::cerr << "warning: range extends past the linear-stability boundary; rows marked unstable\n";
  emit(cfg, "resonance_scan", "csv", [&](std::ostream& os) { t.write(os); });
  if (!cfg.out.empty()) emit(cfg, "crossings", "csv", [&](std::ostream& os) { c.write(os); });
  return kExitOk;
}

int cmd_sweep(const RunConfig& cfg, const Range& r) {
  check_range(r);
  auto o = cfg.pipeline_options();
  o.halving = false;
  const auto grid = mu_grid(r.mu_min, r.mu_max, r.steps);
  if (!grid.empty()) {
    try {
      (void)cfg.params_at(grid.front());
    } catch (const Error& e) {
      throw Exit{kExitConfig, fmt::format("error: {}: {}", to_string(e.kind()), e.what())};
    }
  }
  auto rows = ordered_parallel(grid.size(), [&](std::size_t i) {
    std::vector<std::string> row{num(grid[i])};
    PipelineState st;
    try {
      const auto rep = run_pipeline(cfg.params_at(grid[i]), o, &st);
      const auto fail = rep.first_failing_stage();
      row.push_back(fail ? "fail" : "pass");
      row.push_back(fail.value_or(""));
      row.push_back("");
    } catch (const Error& e) {
      row.insert(row.end(), {"error", "", std::string(to_string(e.kind()))});
    }
    row.push_back(st.modes ? num(st.modes->freq.omega1) : "");
    row.push_back(st.modes ? num(st.modes->freq.omega2) : "");
    row.push_back(st.b2 ? num(st.b2->residual) : "");
    row.push_back(st.h3 ? num(st.h3->max_abs()) : "");
    row.push_back(st.h3 ? num(st.h3->S) : "");
    return row;
  });
  CsvBlock t{"sweep",
             {"mu", "result", "first_failing_stage", "error_kind", "omega1", "omega2", "b2_residual", "h3_max_abs",
              "h3_scale"},
             std::move(rows)};
  emit(cfg, "sweep", "csv", [&](std::ostream& os) { t.write(os); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normal-form checks at the triangular points of the perturbed restricted three-body problem"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  add_config_options(app, ov);
  Range range;
  auto* eq = app.add_subcommand("equilibria", "triangular point by every method");
  auto* fr = app.add_subcommand("frequencies", "linear frequencies and the Moser check");
  auto* ve = app.add_subcommand("verify", "run pipeline stages and gate on their checks");
  auto* rs = app.add_subcommand("resonance-scan", "Moser check over a mass-ratio grid");
  auto* sw = app.add_subcommand("sweep", "verification pipeline over a mass-ratio grid");
  for (auto* sub : {rs, sw}) {
    sub->add_option("--mu-min", range.mu_min, "first grid point");
    sub->add_option("--mu-max", range.mu_max, "last grid point");
    sub->add_option("--steps", range.steps, "number of grid points");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  try {
    const auto cfg = resolve_config(ov);
    if (eq->parsed()) return cmd_equilibria(cfg);
    if (fr->parsed()) return cmd_frequencies(cfg);
    if (ve->parsed()) return cmd_verify(cfg);
    if (rs->parsed()) return cmd_resonance_scan(cfg, range);
    if (sw->parsed()) return cmd_sweep(cfg, range);
  } catch (const Exit& e) {
    std::cerr << e.message << '\n';
    return e.code;
  } catch (const ConfigError& e) {
    std::cerr << "error: Config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitTyped;
  }
  return kExitConfig;
}
