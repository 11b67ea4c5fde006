#ifndef L4NORM_H3_CLOSED_HPP
#define L4NORM_H3_CLOSED_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include "l4norm/equilibria.hpp"
#include "l4norm/model.hpp"
#include "l4norm/poly.hpp"
#include "l4norm/report.hpp"

namespace l4norm {

/// L3 = (T1 xi^3 + 3 T2 xi^2 eta + 3 T3 xi eta^2 + T4 eta^3) / 6 + T5, and
/// H3 = -L3.
struct H3CoefficientsClosedForm {
  double T1 = 0.0;
  double T2 = 0.0;
  double T3 = 0.0;
  double T4 = 0.0;
  /// Homogeneous cubic part of the printed drag term.
  TruncatedPoly T5{3};
  /// The printed drag term as written; its first bracket is only quadratic.
  TruncatedPoly T5_as_printed{3};
};

/// Which cubic Lagrangian feeds the second-order stage.
enum class CubicSource { Oracle, Printed };

namespace detail {
struct SeriesVars {
  double g, e, A, w, s3;
};
inline SeriesVars series_vars(const ModelParams& p) {
  return {p.gamma(), p.epsilon(), p.A2(), p.n() * p.W1(), std::sqrt(3.0)};
}
}  // namespace detail

inline H3CoefficientsClosedForm t_coefficients_closed_form(const ModelParams& p,
                                                           const OriginShift& shift) {
  const auto [g, e, A, w, s3] = detail::series_vars(p);
  H3CoefficientsClosedForm t;
  t.T1 = 3.0 / 16.0 *
         (16.0 / 3.0 * e + 6.0 * A - 979.0 / 18.0 * A * e + (143.0 + 9.0 * g) / (6.0 * s3) * w +
          (459.0 + 376.0 * g) / (27.0 * s3) * w * e +
          g * (14.0 + 4.0 * e / 3.0 + 25.0 * A - 1507.0 / 18.0 * A * e -
               (215.0 + 29.0 * g) / (6.0 * s3) * w -
               2.0 * (1174.0 + 169.0 * g) / (27.0 * s3) * w * e));
  t.T2 = 3.0 * s3 / 16.0 *
         (14.0 - 16.0 / 3.0 * e + A / 3.0 - 367.0 / 18.0 * A * e +
          115.0 * (1.0 + g) / (18.0 * s3) * w - (959.0 - 136.0 * g) / (27.0 * s3) * w * e +
          g * (32.0 * e / 3.0 + 40.0 * A - 382.0 / 9.0 * A * e +
               (511.0 + 53.0 * g) / (6.0 * s3) * w - (2519.0 - 24.0 * g) / (27.0 * s3) * w * e));
  t.T3 = -9.0 / 16.0 *
         (8.0 / 3.0 * e + 203.0 * A / 6.0 - 625.0 / 54.0 * A * e -
          (105.0 + 15.0 * g) / (18.0 * s3) * w - (403.0 - 114.0 * g) / (81.0 * s3) * w * e +
          g * (2.0 - 4.0 * e / 9.0 + 55.0 * A / 2.0 - 797.0 / 54.0 * A * e +
               (197.0 + 23.0 * g) / (18.0 * s3) * w - (211.0 - 32.0 * g) / (81.0 * s3) * w * e));
  t.T4 = -9.0 * s3 / 16.0 *
         (2.0 - 8.0 / 3.0 * e + 23.0 * A / 3.0 - 44.0 * A * e - (37.0 + g) / (18.0 * s3) * w -
          (219.0 + 253.0 * g) / (81.0 * s3) * w * e +
          g * (4.0 * e + 88.0 / 27.0 * A * e + (241.0 + 45.0 * g) / (18.0 * s3) * w -
               (1558.0 - 126.0 * g) / (81.0 * s3) * w * e));

  const double a = shift.a;
  const double b = shift.b;
  const double rho2 = a * a + b * b;
  const auto x = TruncatedPoly::variable(kXi, 3);
  const auto y = TruncatedPoly::variable(kEta, 3);
  const auto xd = TruncatedPoly::variable(kXiDot, 3);
  const auto yd = TruncatedPoly::variable(kEtaDot, 3);
  const auto proj = x * a + y * b;
  const auto perp = x * b - y * a;
  const auto vproj = xd * a + yd * b;
  const double pre = p.W1() / (2.0 * rho2 * rho2 * rho2);
  t.T5_as_printed =
      (vproj * (proj * 3.0 - perp * perp) - (x * xd + y * yd) * proj * (2.0 * rho2)) * pre;
  t.T5 = t.T5_as_printed.slice(3);
  return t;
}

/// Cubic Lagrangian assembled from the closed-form coefficients.
inline TruncatedPoly closed_form_l3(const H3CoefficientsClosedForm& t) {
  TruncatedPoly l(3);
  l.add_term({3, 0, 0, 0}, t.T1 / 6.0);
  l.add_term({2, 1, 0, 0}, t.T2 / 2.0);
  l.add_term({1, 2, 0, 0}, t.T3 / 2.0);
  l.add_term({0, 3, 0, 0}, t.T4 / 6.0);
  l += t.T5;
  return l;
}

/// The same coefficients read off an oracle cubic slice.
struct H3CoefficientsOracle {
  double T1, T2, T3, T4;
  TruncatedPoly T5;
};

inline H3CoefficientsOracle t_coefficients_from_oracle(const TruncatedPoly& lagrangian) {
  const auto l3 = lagrangian.slice(3);
  return {6.0 * l3.coeff({3, 0, 0, 0}), 2.0 * l3.coeff({2, 1, 0, 0}),
          2.0 * l3.coeff({1, 2, 0, 0}), 6.0 * l3.coeff({0, 3, 0, 0}),
          l3.velocity_slice(1) + l3.velocity_slice(2) + l3.velocity_slice(3)};
}

/// Per-coefficient reconciliation of the closed-form cubic against the oracle.
/// Discrepancies are report content; nothing here gates a run.
inline StageReport compare_h3(const TruncatedPoly& oracle, const H3CoefficientsClosedForm& closed,
                              const ModelParams& p) {
  if (oracle.degree_cap() < 3) throw ContractError("oracle must carry degree 3");
  const auto o = t_coefficients_from_oracle(oracle);
  const double h = std::max({p.epsilon(), p.A2(), p.W1()});
  StageReport s;
  s.stage = "h3-closed-form";
  CsvBlock csv{"t_coefficients", {"name", "closed_form", "oracle", "abs_diff", "rel_diff", "bound"}, {}};
  auto add = [&](const std::string& name, double c, double ref) {
    const double diff = std::abs(c - ref);
    const double rel = diff / std::max(std::abs(ref), 1e-300);
    const double bound = 1e-10 + 50.0 * h * h * std::max(1.0, std::abs(ref));
    s.checks.push_back(make_check(name + "_abs_diff", diff, bound, false));
    csv.rows.push_back({name, num(c), num(ref), num(diff), num(rel), num(bound)});
  };
  add("T1", closed.T1, o.T1);
  add("T2", closed.T2, o.T2);
  add("T3", closed.T3, o.T3);
  add("T4", closed.T4, o.T4);
  const double t5diff = max_abs_difference(closed.T5, o.T5);
  const double t5bound = 1e-10 + 50.0 * h * h;
  s.checks.push_back(make_check("T5_abs_diff", t5diff, t5bound, false));
  csv.rows.push_back({"T5", num(closed.T5.max_abs()), num(o.T5.max_abs()), num(t5diff), "", num(t5bound)});
  s.tables.push_back(std::move(csv));
  return s;
}

}  // namespace l4norm

#endif  // L4NORM_H3_CLOSED_HPP
