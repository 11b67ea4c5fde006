#ifndef L4NORM_VERIFY_HPP
#define L4NORM_VERIFY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "l4norm/dalembert.hpp"
#include "l4norm/equilibria.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/h3_closed.hpp"
#include "l4norm/model.hpp"
#include "l4norm/normal_modes.hpp"
#include "l4norm/report.hpp"
#include "l4norm/second_order.hpp"
#include "l4norm/tables.hpp"
#include "l4norm/taylor.hpp"

namespace l4norm {

enum class Stage { Equilibria, Taylor, B1, B2, H3 };

inline constexpr std::array<Stage, 5> kAllStages{Stage::Equilibria, Stage::Taylor, Stage::B1, Stage::B2,
                                                 Stage::H3};

constexpr std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Equilibria: return "equilibria";
    case Stage::Taylor: return "taylor";
    case Stage::B1: return "b1";
    case Stage::B2: return "b2";
    case Stage::H3: return "h3";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
  for (auto st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

inline std::map<Stage, double> default_tolerances() {
  return {{Stage::Equilibria, 1e-12}, {Stage::Taylor, 1e-10}, {Stage::B1, 1e-10}, {Stage::B2, 1e-9},
          {Stage::H3, 1e-8}};
}

struct PipelineOptions {
  Branch branch = Branch::L4;
  /// Requested stages; prerequisites always run.
  std::set<Stage> stages{kAllStages.begin(), kAllStages.end()};
  std::map<Stage, double> tolerances = default_tolerances();
  CubicSource cubic = CubicSource::Oracle;
  /// Unset: pick the reading with the smaller linear residual.
  std::optional<B1Reading> reading;
  /// Attach the perturbation-halving table to the b2 stage.
  bool halving = true;

  double tol(Stage s) const {
    auto it = tolerances.find(s);
    return it != tolerances.end() ? it->second : default_tolerances().at(s);
  }
  Stage last_stage() const {
    Stage last = Stage::Equilibria;
    for (auto s : stages) last = std::max(last, s);
    return last;
  }
};

/// Intermediate products of one pipeline run, for callers that need more than
/// the report.
struct PipelineState {
  std::optional<EquilibriumPoint> numeric;
  std::optional<OriginShift> shift;
  std::optional<TruncatedPoly> lagrangian;
  std::optional<QuadraticCoefficients> efg;
  std::optional<NormalModeData> modes;
  std::optional<FirstOrder> b1;
  std::optional<SecondOrderSolution> b2;
  std::optional<H3NormalCoefficients> h3;
};

inline std::string series_csv_key(const HarmonicKey& k) { return fmt::format("{} {} {} {}", k.j, k.m, k.p, k.q); }

/// Coefficients r1..r10 of a B2 x series in the printed harmonic layout; for
/// B2 y pass the negated series to get s1..s10.
inline std::array<double, 10> layout_coefficients(const DAlembertSeries& b) {
  const auto c = [&](int j, int m, int p, int q) { return b.coeff({j, m, p, q}); };
  return {c(2, 0, 0, 0).C, c(0, 2, 0, 0).C, c(2, 0, 2, 0).C, c(0, 2, 0, 2).C, c(1, 1, 1, -1).C,
          c(1, 1, 1, 1).C, c(2, 0, 2, 0).S, c(0, 2, 0, 2).S, c(1, 1, 1, -1).S, c(1, 1, 1, 1).S};
}

/// A closed-form quantity and its oracle at one parameter point.
struct FormulaSample {
  std::string id;
  std::string location;
  std::string group;  // equilibria, h3, j, b2, b1
  double closed = 0.0;
  double oracle = 0.0;
  /// |closed - oracle|, or a norm for polynomial-valued quantities.
  double diff = 0.0;
  double scale = 1.0;
};

/// Every registered closed form evaluated at p; groups beyond the equilibria
/// need a linearly stable, non-resonant point.
inline std::vector<FormulaSample> evaluate_formulas(const ModelParams& p, bool equilibria_only = false) {
  std::vector<FormulaSample> out;
  auto add = [&](std::string id, std::string loc, std::string group, double closed, double oracle) {
    out.push_back({std::move(id), std::move(loc), std::move(group), closed, oracle, std::abs(closed - oracle),
                   std::max(1.0, std::abs(oracle))});
  };
  const auto root = solve_triangular_numeric(p, Branch::L4);
  const auto ser = triangular_series(p, Branch::L4);
  const auto eps = epsilon_form(p, Branch::L4);
  const auto off = offset_ab(p);
  const auto shift = OriginShift::from_point(root, p);
  add("eq.series.x", "triangular point series, x", "equilibria", ser.x, root.x);
  add("eq.series.y", "triangular point series, y", "equilibria", ser.y, root.y);
  add("eq.epsilon_form.x", "epsilon-form expansion of the triangular point, x", "equilibria", eps.x, root.x);
  add("eq.epsilon_form.y", "epsilon-form expansion of the triangular point, y", "equilibria", eps.y, root.y);
  add("eq.offset.a", "origin shift a = x* + mu", "equilibria", off.a, shift.a);
  add("eq.offset.b", "origin shift b = y*", "equilibria", off.b, shift.b);
  if (equilibria_only) return out;

  const auto L = taylor_lagrangian(p, shift, 3);
  const auto closed = t_coefficients_closed_form(p, shift);
  const auto oracle = t_coefficients_from_oracle(L);
  add("h3.T1", "cubic coefficient T1", "h3", closed.T1, oracle.T1);
  add("h3.T2", "cubic coefficient T2", "h3", closed.T2, oracle.T2);
  add("h3.T3", "cubic coefficient T3", "h3", closed.T3, oracle.T3);
  add("h3.T4", "cubic coefficient T4", "h3", closed.T4, oracle.T4);
  out.push_back({"h3.T5", "velocity-dependent drag cubic T5", "h3", closed.T5.max_abs(), oracle.T5.max_abs(),
                 max_abs_difference(closed.T5, oracle.T5), 1.0});

  const auto q = extract_EFG(L.slice(2), p);
  const auto w = frequencies(p, q);
  const auto nm = j_numeric(p, q, w);
  const auto jn = nm.entries().as_array();
  const auto jc = j_closed_form(p, w).J.as_array();
  for (std::size_t i = 0; i < 6; ++i) {
    add(fmt::format("j.{}", JEntries::names[i]), fmt::format("normal-mode entry {}", JEntries::names[i]), "j",
        jc[i], jn[i]);
  }

  const auto printed = first_order_components(nm, B1Reading::Printed);
  out.push_back({"b1.y.printed", "first-order y component as printed (J24 term on sin phi2)", "b1", 0.0, 0.0,
                 linear_residual(q, w, printed), 1.0});

  const auto b1 = first_order_components(nm);
  const auto sol = solve_second_order_oracle(q, w, forcing_x2y2(L, b1, w));
  const auto rs = rs_tables(nm, fg_tables(p));
  const auto ro = layout_coefficients(sol.B2.x);
  const auto so = layout_coefficients(-sol.B2.y);
  for (std::size_t i = 0; i < 10; ++i) {
    add(fmt::format("b2.r{}", i + 1), fmt::format("second-order coefficient r{}", i + 1), "b2", rs.r[i], ro[i]);
  }
  for (std::size_t i = 0; i < 10; ++i) {
    add(fmt::format("b2.s{}", i + 1), fmt::format("second-order coefficient s{}", i + 1), "b2", rs.s[i], so[i]);
  }
  return out;
}

enum class Perturbation { Epsilon, A2, W1 };

inline constexpr std::array<Perturbation, 3> kPerturbations{Perturbation::Epsilon, Perturbation::A2,
                                                            Perturbation::W1};

constexpr std::string_view to_string(Perturbation k) noexcept {
  switch (k) {
    case Perturbation::Epsilon: return "epsilon";
    case Perturbation::A2: return "A2";
    case Perturbation::W1: return "W1";
  }
  return "?";
}

inline ModelParams single_perturbation(double mu, Perturbation k, double h) {
  return ModelParams::perturbed(mu, k == Perturbation::Epsilon ? h : 0.0, k == Perturbation::A2 ? h : 0.0,
                                k == Perturbation::W1 ? h : 0.0);
}

inline constexpr double kHalvingStep = 1e-3;
inline constexpr double kZerothOrderTolerance = 1e-9;
inline constexpr double kExactTolerance = 1e-11;

enum class OrderCategory { Exact, SecondOrder, FirstOrder, ZerothOrder, Indeterminate };

constexpr std::string_view to_string(OrderCategory c) noexcept {
  switch (c) {
    case OrderCategory::Exact: return "exact";
    case OrderCategory::SecondOrder: return "second-order";
    case OrderCategory::FirstOrder: return "first-order";
    case OrderCategory::ZerothOrder: return "zeroth-order";
    case OrderCategory::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// Halving ratio d(h)/d(h/2) of one formula under one perturbation.
struct OrderClassification {
  std::string id;
  std::string location;
  std::string group;
  double mu = 0.0;
  Perturbation perturbation = Perturbation::Epsilon;
  double d0 = 0.0;
  double d_full = 0.0;
  double d_half = 0.0;
  double ratio = 0.0;
  OrderCategory category = OrderCategory::Exact;

  /// Acceptable as truncation remainder.
  bool within_order() const {
    return category == OrderCategory::Exact || category == OrderCategory::SecondOrder;
  }
};

inline OrderCategory classify(double d0, double dh, double dh2, double scale) {
  if (d0 > kZerothOrderTolerance * scale) return OrderCategory::ZerothOrder;
  if (dh <= kExactTolerance * scale) return OrderCategory::Exact;
  const double r = dh / dh2;
  if (r >= 3.5 && r <= 4.5) return OrderCategory::SecondOrder;
  if (r >= 1.5 && r <= 2.5) return OrderCategory::FirstOrder;
  return OrderCategory::Indeterminate;
}

/// Classifies every registered formula at mass ratio mu by switching each
/// perturbation on alone at h and h/2.
inline std::vector<OrderClassification> classify_formulas(double mu, bool equilibria_only = false,
                                                          double h = kHalvingStep) {
  const auto base = evaluate_formulas(ModelParams::perturbed(mu, 0.0, 0.0, 0.0), equilibria_only);
  std::vector<OrderClassification> out;
  for (auto k : kPerturbations) {
    const auto full = evaluate_formulas(single_perturbation(mu, k, h), equilibria_only);
    const auto half = evaluate_formulas(single_perturbation(mu, k, h / 2.0), equilibria_only);
    for (std::size_t i = 0; i < base.size(); ++i) {
      OrderClassification c;
      c.id = base[i].id;
      c.location = base[i].location;
      c.group = base[i].group;
      c.mu = mu;
      c.perturbation = k;
      c.d0 = base[i].diff;
      c.d_full = full[i].diff;
      c.d_half = half[i].diff;
      c.ratio = c.d_half > 0.0 ? c.d_full / c.d_half : INFINITY;
      c.category = classify(c.d0, c.d_full, c.d_half, base[i].scale);
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline CsvBlock classification_table(const std::vector<OrderClassification>& cs, std::string name) {
  CsvBlock t{std::move(name), {"id", "mu", "perturbation", "d0", "d_h", "d_h_half", "ratio", "category"}, {}};
  for (const auto& c : cs) {
    t.rows.push_back({c.id, num(c.mu), std::string(to_string(c.perturbation)), num(c.d0), num(c.d_full),
                      num(c.d_half), num(c.ratio), std::string(to_string(c.category))});
  }
  return t;
}

/// Printed items that cannot be evaluated against an oracle but are
/// inconsistent on inspection.
inline std::vector<ErratumFlag> structural_errata() {
  return {
      {"dalembert.operator_label", "second-order operator equation for B2 x", "none", "structural", 0.0, 0.0,
       "operator printed as Delta1 Delta1; Delta1 Delta2 implemented"},
      {"dalembert.inverse_display", "harmonic action of 1/(Delta1 Delta2)", "none", "structural", 0.0, 0.0,
       "display repeats one expression on both sides; division by Delta_{p,q} implemented"},
      {"second_order.y_equation", "second-order equation for B2 y", "none", "structural", 0.0, 0.0,
       "second Lagrange equation printed with xddot where yddot is meant"},
      {"j.J24.scales", "normal-mode entry J24", "none", "structural", 0.0, 0.0,
       "last two brackets reference l1, k1 inside the mode-2 entry"},
      {"b2.r5.divisor", "second-order coefficient r5", "none", "structural", 0.0, 0.0,
       "denominator factor (4 omega1 + 2 omega2) where the harmonic divisor gives (omega1 + 2 omega2)"},
      {"b2.r6.divisor", "second-order coefficient r6", "none", "structural", 0.0, 0.0,
       "denominator factor (4 omega1 - 2 omega2) where the harmonic divisor gives (2 omega2 - omega1)"},
      {"h3.T5.square", "velocity-dependent drag cubic T5", "none", "structural", 0.0, 0.0,
       "first bracket 3(ax + by) lacks the square needed for a homogeneous cubic"},
  };
}

/// Flags every formula that fails at zeroth or first order; zeroth-order
/// failures are listed once per formula.
inline std::vector<ErratumFlag> errata_from(const std::vector<OrderClassification>& cs) {
  std::vector<ErratumFlag> out;
  std::set<std::string> zeroth;
  for (const auto& c : cs) {
    if (c.category == OrderCategory::ZerothOrder) {
      if (!zeroth.insert(c.id).second) continue;
      out.push_back({c.id, c.location, "none", "zeroth-order", c.d0, c.d0,
                     fmt::format("disagrees with its oracle at mu = {} with every perturbation off", c.mu)});
    } else if (c.category == OrderCategory::FirstOrder || c.category == OrderCategory::Indeterminate) {
      if (zeroth.count(c.id)) continue;
      out.push_back({fmt::format("{}.{}", c.id, to_string(c.perturbation)), c.location,
                     std::string(to_string(c.perturbation)), std::string(to_string(c.category)), c.d_full,
                     c.d_half, fmt::format("halving ratio {:.4g} at mu = {}", c.ratio, c.mu)});
    }
  }
  return out;
}

inline constexpr std::array<double, 3> kLedgerMassRatios{0.01, 0.1, 0.3};

struct ErratumLedger {
  std::vector<OrderClassification> classifications;
  std::vector<ErratumFlag> numeric;
  std::vector<ErratumFlag> structural;

  std::vector<std::string> ids() const {
    std::set<std::string> s;
    for (const auto& e : numeric) s.insert(e.id);
    for (const auto& e : structural) s.insert(e.id);
    return {s.begin(), s.end()};
  }
};

/// Full classification: every group at mu = 0.01, the equilibrium formulas
/// also at 0.1 and 0.3 (beyond the linear-stability range of the normal form).
inline ErratumLedger build_erratum_ledger() {
  ErratumLedger l;
  for (double mu : kLedgerMassRatios) {
    auto cs = classify_formulas(mu, mu > 0.02);
    l.classifications.insert(l.classifications.end(), cs.begin(), cs.end());
  }
  l.numeric = errata_from(l.classifications);
  // the same formula may fail at several mass ratios; keep the first
  std::set<std::string> seen;
  std::erase_if(l.numeric, [&](const ErratumFlag& e) { return !seen.insert(e.id).second; });
  l.structural = structural_errata();
  return l;
}

namespace detail {

inline StageReport equilibria_stage(const ModelParams& p, const PipelineOptions& o, PipelineState& st) {
  StageReport s{"equilibria", {}, {}, {}};
  const auto root = solve_triangular_numeric(p, o.branch);
  st.numeric = root;
  st.shift = OriginShift::from_point(root, p);
  s.checks.push_back(make_check("numeric_residual", root.residual, o.tol(Stage::Equilibria)));
  CsvBlock t{"equilibria", {"method", "x", "y", "residual", "distance_to_numeric"}, {}};
  t.rows.push_back({"numeric", num(root.x), num(root.y), num(root.residual), num(0.0)});
  auto row = [&](const EquilibriumPoint& e) {
    const double d = std::hypot(e.x - root.x, e.y - root.y);
    t.rows.push_back({std::string(to_string(e.method)), num(e.x), num(e.y), num(e.residual), num(d)});
    s.checks.push_back(make_check(fmt::format("{}_distance", to_string(e.method)), d,
                                  std::max(1e-12, 50.0 * std::pow(std::max({p.epsilon(), p.A2(), p.W1()}), 2.0)),
                                  false, "first-order series against the numeric root"));
  };
  row(triangular_series(p, o.branch));
  row(epsilon_form(p, o.branch));
  s.tables.push_back(std::move(t));
  return s;
}

inline StageReport taylor_stage(const ModelParams& p, const PipelineOptions& o, PipelineState& st) {
  StageReport s{"taylor", {}, {}, {}};
  const auto L = taylor_lagrangian(p, *st.shift, 3);
  st.lagrangian = L;
  const double tol = o.tol(Stage::Taylor);
  s.checks.push_back(make_check("degree1_position_norm", L.slice(1).velocity_slice(0).max_abs(), tol));
  const auto l2 = L.slice(2);
  const auto q = extract_EFG(l2, p);
  st.efg = q;
  const auto lin = linearized_euler_lagrange(l2);
  const auto ref = lgeq_left_side(q);
  double d = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 6; ++j) d = std::max(d, std::abs(lin[i][j] - ref[i][j]));
  }
  s.checks.push_back(make_check("linear_equations_identity", d, tol));
  const auto h3 = hamiltonian_cubic_from_lagrangian(L);
  const auto ho = hamiltonian_oracle(p, *st.shift, 3).slice(3);
  s.checks.push_back(make_check("legendre_cubic", max_abs_difference(h3, ho), tol));
  s.checks.push_back(make_check("w1_free_cubic_has_no_velocity",
                                p.W1() == 0.0 ? (L.slice(3) - L.slice(3).velocity_slice(0)).max_abs() : 0.0, tol));
  auto cmp = compare_h3(L, t_coefficients_closed_form(p, *st.shift), p);
  for (auto& c : cmp.checks) s.checks.push_back(std::move(c));
  for (auto& t : cmp.tables) s.tables.push_back(std::move(t));
  CsvBlock e{"quadratic_coefficients", {"E", "F", "G", "gyro", "n"}, {}};
  e.rows.push_back({num(q.E), num(q.F), num(q.G), num(q.gyro), num(q.n)});
  s.tables.push_back(std::move(e));
  return s;
}

inline StageReport b1_stage(const ModelParams& p, const PipelineOptions& o, PipelineState& st) {
  StageReport s{"b1", {}, {}, {}};
  const auto& q = *st.efg;
  const auto w = frequencies(p, q);
  const auto moser = moser_check(w);
  if (!moser.pass) {
    throw SmallDivisorError(fmt::format(
        "Moser condition fails: |{} omega1 {:+d} omega2| = {:.3e} <= {:.1e} (omega1 = {:.17g}, omega2 = {:.17g})",
        moser.k1, moser.k2, moser.min_combination, moser.tolerance, w.omega1, w.omega2));
  }
  const auto nm = j_numeric(p, q, w);
  st.modes = nm;
  const double tol = o.tol(Stage::B1);
  s.checks.push_back(make_check("symplectic_defect", symplectic_defect(nm.J), tol));
  s.checks.push_back(make_check("h2_residual", h2_residual(nm), tol));
  s.checks.push_back(make_check("moser_min_combination", -moser.min_combination, -moser.tolerance, true,
                                fmt::format("witness ({}, {})", moser.k1, moser.k2)));
  const auto choice = select_b1_reading(q, nm);
  const auto reading = o.reading.value_or(choice.reading);
  const auto b1 = first_order_components(nm, reading);
  st.b1 = b1;
  s.checks.push_back(make_check("linear_residual", linear_residual(q, w, b1), tol, true,
                                fmt::format("reading {}", to_string(reading))));
  s.checks.push_back(make_check("linear_residual_printed_reading", choice.residual_printed, tol, false));
  CsvBlock f{"frequencies", {"omega1", "omega2", "moser_min", "k1", "k2"}, {}};
  f.rows.push_back({num(w.omega1), num(w.omega2), num(moser.min_combination), std::to_string(moser.k1),
                    std::to_string(moser.k2)});
  s.tables.push_back(std::move(f));
  const auto jc = j_closed_form(p, w).J.as_array();
  const auto jn = nm.entries().as_array();
  CsvBlock j{"j_entries", {"name", "numeric", "closed_form", "abs_diff"}, {}};
  for (std::size_t i = 0; i < 6; ++i) {
    j.rows.push_back({JEntries::names[i], num(jn[i]), num(jc[i]), num(std::abs(jn[i] - jc[i]))});
  }
  s.tables.push_back(std::move(j));
  return s;
}

inline TruncatedPoly operative_lagrangian(const ModelParams& p, const PipelineOptions& o, const PipelineState& st) {
  if (o.cubic == CubicSource::Oracle) return *st.lagrangian;
  auto l = st.lagrangian->truncate(2);
  auto c = closed_form_l3(t_coefficients_closed_form(p, *st.shift));
  TruncatedPoly out(3);
  out += l;
  out += c;
  return out;
}

inline StageReport b2_stage(const ModelParams& p, const PipelineOptions& o, PipelineState& st,
                            const std::vector<OrderClassification>& halving) {
  StageReport s{"b2", {}, {}, {}};
  const auto& nm = *st.modes;
  const auto& w = nm.freq;
  const auto L = operative_lagrangian(p, o, st);
  for (auto [pp, qq] : std::array<std::pair<int, int>, 5>{{{0, 0}, {2, 0}, {0, 2}, {1, 1}, {1, -1}}}) {
    s.checks.push_back(make_check(fmt::format("divisor_{}_{}", pp, qq), -std::abs(small_divisor(pp, qq, w)),
                                  -kDivisorFloor, true, "|Delta| must exceed the floor"));
  }
  const auto f = forcing_x2y2(L, *st.b1, w);
  const auto sol = solve_second_order_oracle(*st.efg, w, f);
  st.b2 = sol;
  s.checks.push_back(make_check("back_substitution_residual", sol.residual, o.tol(Stage::B2) * sol.scale, true,
                                fmt::format("scale {}", num(sol.scale))));
  auto drag_free = *st.efg;
  drag_free.K = {0.0, 0.0, 0.0, 0.0};
  const auto alt = solve_second_order_oracle(drag_free, w, f);
  s.checks.push_back(make_check("back_substitution_residual_drag_free_efg", alt.residual,
                                o.tol(Stage::B2) * alt.scale, false,
                                fmt::format("max |B2 difference| {}", num(std::max(
                                    max_abs_difference(alt.B2.x, sol.B2.x), max_abs_difference(alt.B2.y, sol.B2.y))))));
  s.checks.push_back(make_check("parity", sol.B2.x.parity_ok() && sol.B2.y.parity_ok() ? 0.0 : 1.0, 0.5));

  const auto closed = second_order_closed_form(rs_tables(nm, fg_tables(p)));
  const double dx = max_abs_difference(closed.x, sol.B2.x);
  const double dy = max_abs_difference(closed.y, sol.B2.y);
  s.checks.push_back(make_check("closed_form_vs_oracle", std::max(dx, dy),
                                1e-9 * std::max(1.0, std::max(sol.B2.x.max_abs(), sol.B2.y.max_abs())), false));
  CsvBlock t{"b2_coefficients", {"component", "j m p q", "oracle_C", "oracle_S", "closed_C", "closed_S"}, {}};
  auto rows = [&](const char* comp, const DAlembertSeries& a, const DAlembertSeries& b) {
    std::set<HarmonicKey> keys;
    for (const auto& kv : a.terms()) keys.insert(kv.first);
    for (const auto& kv : b.terms()) keys.insert(kv.first);
    for (const auto& k : keys) {
      const auto ca = a.coeff(k), cb = b.coeff(k);
      t.rows.push_back({comp, series_csv_key(k), num(ca.C), num(ca.S), num(cb.C), num(cb.S)});
    }
  };
  rows("x", sol.B2.x, closed.x);
  rows("y", sol.B2.y, closed.y);
  s.tables.push_back(std::move(t));

  if (o.halving) {
    auto cs = halving;
    std::erase_if(cs, [](const OrderClassification& c) { return c.group != "b2"; });
    for (const auto& c : cs) {
      s.checks.push_back(make_check(fmt::format("halving.{}.{}", c.id, to_string(c.perturbation)),
                                    c.within_order() ? 0.0 : 1.0, 0.5, false, std::string(to_string(c.category))));
    }
    s.tables.push_back(classification_table(cs, "b2_halving"));
  }
  return s;
}

inline StageReport h3_stage(const ModelParams& p, const PipelineOptions& o, PipelineState& st) {
  StageReport s{"h3", {}, {}, {}};
  const auto L = operative_lagrangian(p, o, st);
  const auto& w = st.modes->freq;
  const auto h = h3_normal_coefficients(L, w, *st.b1, st.b2->B2);
  st.h3 = h;
  const double tol = o.tol(Stage::H3) * h.S;
  s.checks.push_back(make_check("A30", h.A30, tol));
  s.checks.push_back(make_check("A21", h.A21, tol));
  s.checks.push_back(make_check("A12", h.A12, tol));
  s.checks.push_back(make_check("A03", h.A03, tol));
  const auto ablation = h3_normal_coefficients(L, w, *st.b1, SecondOrder{});
  s.checks.push_back(make_check("ablation_power", -ablation.max_abs(), -1e3 * tol, false,
                                "without B2 the coefficients must exceed 1e3 times the bound"));
  CsvBlock t{"h3_coefficients", {"name", "max_abs", "angle_average", "ablation_max_abs", "bound"}, {}};
  t.rows.push_back({"A30", num(h.A30), num(h.avg30), num(ablation.A30), num(tol)});
  t.rows.push_back({"A21", num(h.A21), num(h.avg21), num(ablation.A21), num(tol)});
  t.rows.push_back({"A12", num(h.A12), num(h.avg12), num(ablation.A12), num(tol)});
  t.rows.push_back({"A03", num(h.A03), num(h.avg03), num(ablation.A03), num(tol)});
  s.tables.push_back(std::move(t));
  return s;
}

/// Stage whose formulas an erratum id belongs to, if that stage ran.
inline StageReport* owning_stage(VerificationReport& r, std::string_view id) {
  const std::string_view prefix = id.substr(0, id.find('.'));
  std::string_view stage = "b2";
  if (prefix == "eq") stage = "equilibria";
  if (prefix == "h3") stage = "taylor";
  if (prefix == "j" || prefix == "b1") stage = "b1";
  for (auto& s : r.stages) {
    if (s.stage == stage) return &s;
  }
  return nullptr;
}

}  // namespace detail

/// Runs the requested stages (and their prerequisites) in order. Typed errors
/// from a stage propagate to the caller.
inline VerificationReport run_pipeline(const ModelParams& p, const PipelineOptions& o,
                                       PipelineState* state = nullptr) {
  PipelineState local;
  PipelineState& st = state ? *state : local;
  VerificationReport r;
  std::string stages;
  for (auto s : o.stages) stages += (stages.empty() ? "" : ",") + std::string(to_string(s));
  r.header = {{"mu", num(p.mu())},
              {"q1", num(p.q1())},
              {"epsilon", num(p.epsilon())},
              {"A2", num(p.A2())},
              {"W1", num(p.W1())},
              {"cd", p.cd() ? num(*p.cd()) : std::string("unset")},
              {"branch", std::string(to_string(o.branch))},
              {"stages", stages},
              {"cubic_source", o.cubic == CubicSource::Oracle ? "oracle" : "printed"}};
  for (const auto& wmsg : p.warnings()) r.header.emplace_back("warning", wmsg);
  const Stage last = o.last_stage();
  r.stages.push_back(detail::equilibria_stage(p, o, st));
  if (last >= Stage::Taylor) r.stages.push_back(detail::taylor_stage(p, o, st));
  if (last >= Stage::B1) r.stages.push_back(detail::b1_stage(p, o, st));
  std::vector<OrderClassification> halving;
  if (o.halving) halving = classify_formulas(p.mu(), last < Stage::B1);
  if (last >= Stage::B2) r.stages.push_back(detail::b2_stage(p, o, st, halving));
  if (last >= Stage::H3) r.stages.push_back(detail::h3_stage(p, o, st));
  if (o.halving) {
    auto flags = errata_from(halving);
    const auto structural = structural_errata();
    flags.insert(flags.end(), structural.begin(), structural.end());
    for (auto& f : flags) {
      if (auto* s = detail::owning_stage(r, f.id)) s->errata.push_back(std::move(f));
    }
  }
  return r;
}

}  // namespace l4norm

#endif  // L4NORM_VERIFY_HPP
