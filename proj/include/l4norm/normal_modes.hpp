#ifndef L4NORM_NORMAL_MODES_HPP
#define L4NORM_NORMAL_MODES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "l4norm/dalembert.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/h3_closed.hpp"
#include "l4norm/model.hpp"
#include "l4norm/taylor.hpp"

namespace l4norm {

enum class LinearStability { Stable, Boundary, Unstable };

constexpr std::string_view to_string(LinearStability s) noexcept {
  switch (s) {
    case LinearStability::Stable: return "stable";
    case LinearStability::Boundary: return "boundary";
    case LinearStability::Unstable: return "unstable";
  }
  return "?";
}

/// omega^4 - S omega^2 + P = 0 with S = a + b + gyro^2, P = a b - G^2.
struct Characteristic {
  double S, P, discriminant;
};

inline Characteristic characteristic(const QuadraticCoefficients& q) {
  const double S = q.a() + q.b() + q.gyro * q.gyro;
  const double P = q.a() * q.b() - q.G * q.G;
  return {S, P, S * S - 4.0 * P};
}

inline constexpr double kBoundaryTolerance = 1e-12;

inline LinearStability classify_linear_stability(const QuadraticCoefficients& q,
                                                 double tol = kBoundaryTolerance) {
  const auto c = characteristic(q);
  if (!(c.S > 0.0) || !(c.P > 0.0) || c.discriminant < -tol) return LinearStability::Unstable;
  return c.discriminant <= tol ? LinearStability::Boundary : LinearStability::Stable;
}

/// First-order system in (xi, eta, xidot, etadot).
inline Eigen::Matrix4d linear_system_matrix(const QuadraticCoefficients& q) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 2) = 1.0;
  m(1, 3) = 1.0;
  m(2, 0) = -q.a();
  m(2, 1) = -q.G;
  m(2, 3) = q.gyro;
  m(3, 0) = -q.G;
  m(3, 1) = -q.b();
  m(3, 2) = -q.gyro;
  return m;
}

inline std::vector<std::complex<double>> linear_eigenvalues(const QuadraticCoefficients& q) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(linear_system_matrix(q), false);
  std::vector<std::complex<double>> v(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(v.begin(), v.end(), [](auto x, auto y) {
    return x.imag() != y.imag() ? x.imag() > y.imag() : x.real() > y.real();
  });
  return v;
}

inline std::string eigenvalue_layout(const QuadraticCoefficients& q) {
  std::string s;
  for (const auto& z : linear_eigenvalues(q)) {
    s += fmt::format("{}({:.6e} {:+.6e}i)", s.empty() ? "" : " ", z.real(), z.imag());
  }
  return s;
}

/// Basic frequencies from the quadratic part, sorted omega1 >= omega2. At the
/// stability boundary both equal sqrt(S/2).
inline FrequencyPair frequencies(const ModelParams& p, const QuadraticCoefficients& q) {
  const auto c = characteristic(q);
  const auto stab = classify_linear_stability(q);
  if (stab == LinearStability::Unstable) {
    throw StabilityDomainError(fmt::format(
        "linearised system at mu = {} is not of centre x centre type (discriminant {:.6e}); "
        "eigenvalues: {}",
        p.mu(), c.discriminant, eigenvalue_layout(q)));
  }
  const double root = stab == LinearStability::Boundary ? 0.0 : std::sqrt(c.discriminant);
  return {std::sqrt((c.S + root) / 2.0), std::sqrt((c.S - root) / 2.0)};
}

inline std::vector<std::string> frequency_warnings(const FrequencyPair& w, double tol = 1e-3) {
  std::vector<std::string> out;
  if (std::abs(w.omega1 - w.omega2) < tol) {
    out.push_back(fmt::format("near-equal frequencies ({:.17g}, {:.17g}): 1:1 resonance", w.omega1,
                              w.omega2));
  }
  return out;
}

/// The six transformation entries that carry closed forms.
struct JEntries {
  double J13 = 0.0, J14 = 0.0, J21 = 0.0, J22 = 0.0, J23 = 0.0, J24 = 0.0;

  std::array<double, 6> as_array() const { return {J13, J14, J21, J22, J23, J24}; }
  static constexpr std::array<const char*, 6> names{"J13", "J14", "J21", "J22", "J23", "J24"};
};

struct ModeScales {
  double l1 = 0.0, l2 = 0.0, k1 = 0.0, k2 = 0.0;
};

/// l_j^2 = 4 omega_j^2 + 9, k1^2 = 2 omega1^2 - 1, k2^2 = 1 - 2 omega2^2.
inline ModeScales mode_scales(const FrequencyPair& w, double floor = kDivisorFloor) {
  const double k1sq = 2.0 * w.omega1 * w.omega1 - 1.0;
  const double k2sq = 1.0 - 2.0 * w.omega2 * w.omega2;
  if (k1sq < floor) {
    throw SmallDivisorError(fmt::format("k1^2 = 2 omega1^2 - 1 = {:.3e} vanishes (omega1^2 -> 1/2)", k1sq));
  }
  if (k2sq < floor) {
    throw SmallDivisorError(fmt::format("k2^2 = 1 - 2 omega2^2 = {:.3e} vanishes (omega2^2 -> 1/2)", k2sq));
  }
  return {std::sqrt(4.0 * w.omega1 * w.omega1 + 9.0), std::sqrt(4.0 * w.omega2 * w.omega2 + 9.0),
          std::sqrt(k1sq), std::sqrt(k2sq)};
}

struct ClosedFormJ {
  JEntries J;
  ModeScales scales;
};

/// The six printed entries, evaluated term by term as printed.
inline ClosedFormJ j_closed_form(const ModelParams& p, const FrequencyPair& wp) {
  const auto sc = mode_scales(wp);
  const auto [g, e, A, w, s3] = detail::series_vars(p);
  const double n = p.n();
  const double w1 = wp.omega1, w2 = wp.omega2;
  const double l1 = sc.l1, l2 = sc.l2, k1 = sc.k1, k2 = sc.k2;
  const double L1 = l1 * l1, L2 = l2 * l2, K1 = k1 * k1, K2 = k2 * k2;

  ClosedFormJ out{{}, sc};
  auto& J = out.J;
  J.J13 = l1 / (2.0 * w1 * k1) *
          (1.0 -
           1.0 / (2.0 * L1) *
               (e + 45.0 * A / 2.0 - 717.0 * A * e / 36.0 + (67.0 + 19.0 * g) / (12.0 * s3) * w -
                (431.0 - 3.0 * g) / (27.0 * s3) * w * e) +
           g / (2.0 * L1) *
               (3.0 * e - 29.0 * A / 36.0 - (187.0 + 27.0 * g) / (12.0 * s3) * w -
                2.0 * (247.0 + 3.0 * g) / (27.0 * s3) * w * e) -
           1.0 / (2.0 * K1) *
               (e / 2.0 - 3.0 * A - 73.0 * A * e / 24.0 + (1.0 - 9.0 * g) / (24.0 * s3) * w +
                (53.0 - 39.0 * g) / (54.0 * s3) * w * e) -
           g / (4.0 * K1) *
               (e - 3.0 * A - 299.0 * A * e / 72.0 - (6.0 - 5.0 * g) / (12.0 * s3) * w -
                (266.0 - 93.0 * g) / (54.0 * s3) * w * e) +
           e / (4.0 * L1 * K1) * (3.0 * A / 4.0 + (33.0 + 14.0 * g) / (12.0 * s3) * w) +
           g * e / (8.0 * L1 * K1) * (347.0 * A / 36.0 - (43.0 - 8.0 * g) / (4.0 * s3) * w));

  J.J14 = l2 / (2.0 * w2 * k2) *
          (1.0 -
           1.0 / (2.0 * L2) *
               (e + 45.0 * A / 2.0 - 717.0 * A * e / 36.0 + (67.0 + 19.0 * g) / (12.0 * s3) * w -
                (431.0 - 3.0 * g) / (27.0 * s3) * w * e) -
           g / (2.0 * L2) *
               (3.0 * e - 293.0 * A / 36.0 + (187.0 + 27.0 * g) / (12.0 * s3) * w -
                2.0 * (247.0 + 3.0 * g) / (27.0 * s3) * w * e) -
           1.0 / (2.0 * K2) *
               (e / 2.0 - 3.0 * A - 73.0 * A * e / 24.0 + (1.0 - 9.0 * g) / (24.0 * s3) * w +
                (53.0 - 39.0 * g) / (54.0 * s3) * w * e) +
           g / (2.0 * K2) *
               (e - 3.0 * A - 299.0 * A * e / 72.0 - (6.0 - 5.0 * g) / (12.0 * s3) * w -
                (268.0 - 9.0 * g) / (54.0 * s3) * w * e) -
           e / (4.0 * L2 * K2) * (33.0 * A / 4.0 + (1643.0 - 93.0 * g) / (216.0 * s3) * w) +
           g * e / (4.0 * L2 * K2) * (737.0 * A / 72.0 - (13.0 + 2.0 * g) / s3 * w));

  J.J21 = -4.0 * n * w1 / (l1 * k1) *
          (1.0 +
           1.0 / (2.0 * L1) *
               (e + 45.0 * A / 2.0 - 717.0 * A * e / 36.0 + (67.0 + 19.0 * g) / (12.0 * s3) * w -
                (413.0 - 3.0 * g) / (27.0 * s3) * w * e) -
           g / (2.0 * L1) *
               (3.0 * e - 293.0 * A / 36.0 + (187.0 + 27.0 * g) / (12.0 * s3) * w -
                2.0 * (247.0 + 3.0 * g) / (27.0 * s3) * w * e) -
           1.0 / (2.0 * K1) *
               (e / 2.0 - 3.0 * A - 73.0 * A * e / 24.0 + (1.0 - 9.0 * g) / (24.0 * s3) * w +
                (53.0 - 39.0 * g) / (54.0 * s3) * w * e) -
           g / (4.0 * K1) *
               (e - 3.0 * A - 299.0 * A * e / 72.0 - (6.0 - 5.0 * g) / (12.0 * s3) * w -
                (268.0 - 93.0 * g) / (54.0 * s3) * w * e) +
           e / (8.0 * L1 * K1) * (33.0 * A / 4.0 + (68.0 - 10.0 * g) / (24.0 * s3) * w) +
           g * e / (8.0 * L1 * K1) * (242.0 * A / 9.0 + (43.0 - 8.0 * g) / (4.0 * s3) * w));

  J.J22 = 4.0 * n * w2 / (l2 * k2) *
          (1.0 +
           1.0 / (2.0 * L2) *
               (e + 45.0 * A / 2.0 - 717.0 * A * e / 36.0 + (67.0 + 19.0 * g) / (12.0 * s3) * w -
                (413.0 - 3.0 * g) / (27.0 * s3) * w * e) -
           g / (2.0 * L2) *
               (3.0 * e - 293.0 * A / 36.0 + (187.0 + 27.0 * g) / (12.0 * s3) * w -
                2.0 * (247.0 + 3.0 * g) / (27.0 * s3) * w * e) +
           1.0 / (2.0 * K2) *
               (e / 2.0 - 3.0 * A - 73.0 * A * e / 24.0 + (1.0 - 9.0 * g) / (24.0 * s3) * w +
                (53.0 - 39.0 * g) / (54.0 * s3) * w * e) -
           g / (4.0 * K2) *
               (e - 3.0 * A - 299.0 * A * e / 72.0 - (6.0 - 5.0 * g) / (12.0 * s3) * w -
                (268.0 - 93.0 * g) / (54.0 * s3) * w * e) +
           e / (4.0 * L2 * K2) * (33.0 * A / 4.0 + (34.0 + 5.0 * g) / (12.0 * s3) * w) +
           g * e / (8.0 * L2 * K2) * (75.0 * A / 2.0 + (43.0 - 8.0 * g) / (4.0 * s3) * w));

  J.J23 = s3 / (4.0 * w1 * l1 * k1) *
          (2.0 * e + 6.0 * A + 37.0 * A * e / 2.0 - (13.0 + g) / (2.0 * s3) * w +
           2.0 * (79.0 - 7.0 * g) / (9.0 * s3) * w * e -
           g * (6.0 + 2.0 * e / 3.0 + 13.0 * A - 33.0 * A * e / 2.0 + (11.0 - g) / (2.0 * s3) * w -
                (186.0 - g) / (9.0 * s3) * w * e) +
           1.0 / (2.0 * L1) * (51.0 * A + (14.0 + 8.0 * g) / (3.0 * s3) * w) -
           e / K1 * (3.0 * A + (19.0 + 6.0 * g) / (6.0 * s3) * w) -
           g / (2.0 * L1) *
               (6.0 * e + 135.0 * A - 808.0 * A * e / 9.0 - (67.0 + 19.0 * g) / (2.0 * s3) * w -
                (755.0 + 19.0 * g) / (9.0 * s3) * w * e) -
           g / (2.0 * K1) *
               (3.0 * e - 18.0 * A - 55.0 * A * e / 4.0 - (1.0 - 9.0 * g) / (4.0 * s3) * w +
                (923.0 - 60.0 * g) / (12.0 * s3) * w * e) +
           g * e / (8.0 * L1 * K1) * (9.0 * A / 2.0 + (34.0 - 5.0 * g) / (2.0 * s3) * w));

  // the last two brackets reference l1 and k1 as printed
  J.J24 = s3 / (4.0 * w2 * l2 * k2) *
          (2.0 * e + 6.0 * A + 37.0 * A * e / 2.0 - (13.0 + g) / (2.0 * s3) * w +
           2.0 * (79.0 - 7.0 * g) / (9.0 * s3) * w * e -
           g * (6.0 + 2.0 * e / 3.0 + 13.0 * A - 33.0 * A * e / 2.0 + (11.0 - g) / (2.0 * s3) * w -
                (186.0 - g) / (9.0 * s3) * w * e) -
           1.0 / (2.0 * L2) * (51.0 * A + (14.0 + 8.0 * g) / (3.0 * s3) * w) -
           e / K2 * (3.0 * A + (19.0 + 6.0 * g) / (6.0 * s3) * w) -
           g / (2.0 * L2) *
               (6.0 * e + 135.0 * A - 808.0 * A * e / 9.0 - (67.0 + 19.0 * g) / (2.0 * s3) * w -
                (755.0 + 19.0 * g) / (9.0 * s3) * w * e) -
           g / (2.0 * K1) *
               (3.0 * e - 18.0 * A - 55.0 * A * e / 4.0 - (1.0 - 9.0 * g) / (4.0 * s3) * w +
                (923.0 - 60.0 * g) / (12.0 * s3) * w * e) -
           g * e / (4.0 * L1 * K1) * (99.0 * A / 2.0 + (34.0 - 5.0 * g) / (2.0 * s3) * w));
  return out;
}

/// (xi, eta, pi_x, pi_y) = J (Q1, Q2, P1, P2).
struct NormalModeData {
  FrequencyPair freq;
  Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
  QuadraticCoefficients efg;
  ModeScales scales;

  JEntries entries() const {
    return {J(0, 2), J(0, 3), J(1, 0), J(1, 1), J(1, 2), J(1, 3)};
  }
};

inline Eigen::Matrix4d symplectic_unit() {
  Eigen::Matrix4d o = Eigen::Matrix4d::Zero();
  o(0, 2) = o(1, 3) = 1.0;
  o(2, 0) = o(3, 1) = -1.0;
  return o;
}

/// max |J^T Omega J - Omega|.
inline double symplectic_defect(const Eigen::Matrix4d& J) {
  const Eigen::Matrix4d o = symplectic_unit();
  return (J.transpose() * o * J - o).cwiseAbs().maxCoeff();
}

/// Hessian of H2 = |pi - K xi|^2 / 2 - V2(xi) in (xi, eta, pi_x, pi_y).
inline Eigen::Matrix4d h2_matrix(const QuadraticCoefficients& q) {
  Eigen::Matrix2d K;
  K << q.K[0], q.K[1], q.K[2], q.K[3];
  Eigen::Matrix2d Vh;
  Vh << -q.a(), -q.G, -q.G, -q.b();
  Eigen::Matrix4d h;
  h.topLeftCorner<2, 2>() = K.transpose() * K - Vh;
  h.topRightCorner<2, 2>() = -K.transpose();
  h.bottomLeftCorner<2, 2>() = -K;
  h.bottomRightCorner<2, 2>() = Eigen::Matrix2d::Identity();
  return h;
}

/// max deviation of J^T H2 J from diag(omega1^2, -omega2^2, 1, -1), i.e. from
/// omega1 I1 - omega2 I2.
inline double h2_residual(const NormalModeData& nm) {
  Eigen::Matrix4d target = Eigen::Matrix4d::Zero();
  target.diagonal() << nm.freq.omega1 * nm.freq.omega1, -nm.freq.omega2 * nm.freq.omega2, 1.0, -1.0;
  return (nm.J.transpose() * h2_matrix(nm.efg) * nm.J - target).cwiseAbs().maxCoeff();
}

/// Full symplectic transformation built from the mode shapes of the linear
/// Lagrange equations; each mode is scaled so Omega(Q_i, P_i) = 1.
inline NormalModeData j_numeric(const ModelParams& p, const QuadraticCoefficients& q,
                                const FrequencyPair& w) {
  (void)p;
  if (!(w.omega1 > w.omega2 * (1.0 + 1e-12)) || !(w.omega2 > 0.0)) {
    throw SmallDivisorError(fmt::format("resonant frequencies ({:.17g}, {:.17g}): 1:1 degeneracy",
                                        w.omega1, w.omega2));
  }
  NormalModeData nm;
  nm.freq = w;
  nm.efg = q;
  nm.scales = mode_scales(w);
  const double b = q.b();
  auto shape = [&](double om, double sgn) {
    const double den = b - om * om;
    if (std::abs(den) < kDivisorFloor) {
      throw SingularityError("mode shape denominator b - omega^2 vanishes");
    }
    return std::pair{sgn * q.gyro * om / den, -q.G / den};
  };
  const auto [bs1, cc1] = shape(w.omega1, 1.0);
  const auto [bs2, cc2] = shape(w.omega2, -1.0);
  const double o1 = w.omega1 * w.omega1, o2 = w.omega2 * w.omega2;

  auto build = [&](double s1, double s2) {
    const double j13 = s1, j23 = cc1 * s1, j21 = bs1 * s1 * w.omega1;
    const double j14 = s2, j24 = cc2 * s2, j22 = bs2 * s2 * w.omega2;
    Eigen::Matrix4d m;
    m.row(0) << 0.0, 0.0, j13, j14;
    m.row(1) << j21, j22, j23, j24;
    m.row(2) << -j13 * o1, j14 * o2, 0.0, 0.0;
    m.row(3) << -j23 * o1, j24 * o2, j21, -j22;
    Eigen::Matrix4d k = Eigen::Matrix4d::Identity();
    k(2, 0) = q.K[0];
    k(2, 1) = q.K[1];
    k(3, 0) = q.K[2];
    k(3, 1) = q.K[3];
    return Eigen::Matrix4d(k * m);
  };
  const Eigen::Matrix4d unit = build(1.0, 1.0);
  const Eigen::Matrix4d form = unit.transpose() * symplectic_unit() * unit;
  if (!(form(0, 2) > 0.0) || !(form(1, 3) > 0.0)) {
    throw SingularityError(fmt::format(
        "symplectic normalisation failed: Omega(Q1,P1) = {:.3e}, Omega(Q2,P2) = {:.3e}", form(0, 2),
        form(1, 3)));
  }
  nm.J = build(1.0 / std::sqrt(form(0, 2)), 1.0 / std::sqrt(form(1, 3)));
  return nm;
}

/// Reading of the printed first-order y component.
///   Consistent: J23 sqrt(2 omega1 I1) cos phi1 + J24 sqrt(2 omega2 I2) cos phi2
///   Printed:    J23 sqrt(2 I1) omega1 cos phi1 + J24 sqrt(2 I2) omega2 sin phi2
enum class B1Reading { Consistent, Printed };

constexpr std::string_view to_string(B1Reading r) noexcept {
  return r == B1Reading::Consistent ? "consistent" : "printed";
}

struct FirstOrder {
  DAlembertSeries x;  // B1^{1,0}
  DAlembertSeries y;  // B1^{0,1}
};

inline FirstOrder first_order_components(const JEntries& J, const FrequencyPair& w,
                                         B1Reading reading = B1Reading::Consistent) {
  const double r1 = std::sqrt(2.0 * w.omega1), r2 = std::sqrt(2.0 * w.omega2);
  FirstOrder b;
  b.x.add(1, 0, 1, 0, J.J13 * r1, 0.0);
  b.x.add(0, 1, 0, 1, J.J14 * r2, 0.0);
  b.y.add(1, 0, 1, 0, 0.0, J.J21 * std::sqrt(2.0 / w.omega1));
  b.y.add(0, 1, 0, 1, 0.0, J.J22 * std::sqrt(2.0 / w.omega2));
  if (reading == B1Reading::Consistent) {
    b.y.add(1, 0, 1, 0, J.J23 * r1, 0.0);
    b.y.add(0, 1, 0, 1, J.J24 * r2, 0.0);
  } else {
    b.y.add(1, 0, 1, 0, J.J23 * std::sqrt(2.0) * w.omega1, 0.0);
    b.y.add(0, 1, 0, 1, 0.0, J.J24 * std::sqrt(2.0) * w.omega2);
  }
  return b;
}

inline FirstOrder first_order_components(const NormalModeData& nm,
                                         B1Reading reading = B1Reading::Consistent) {
  return first_order_components(nm.entries(), nm.freq, reading);
}

/// Left sides of the linear equations applied to series (x, y).
inline std::pair<DAlembertSeries, DAlembertSeries> linear_operator(const QuadraticCoefficients& q,
                                                                   const FrequencyPair& w,
                                                                   const DAlembertSeries& x,
                                                                   const DAlembertSeries& y) {
  const auto dx = apply_D(x, w), dy = apply_D(y, w);
  auto r1 = apply_D(dx, w) - dy * q.gyro + x * q.a() + y * q.G;
  auto r2 = apply_D(dy, w) + dx * q.gyro + x * q.G + y * q.b();
  return {std::move(r1), std::move(r2)};
}

inline double linear_residual(const QuadraticCoefficients& q, const FrequencyPair& w,
                              const FirstOrder& b) {
  const auto [r1, r2] = linear_operator(q, w, b.x, b.y);
  return std::max(r1.max_abs(), r2.max_abs());
}

struct ReadingChoice {
  B1Reading reading;
  double residual_consistent;
  double residual_printed;
};

/// Picks the reading whose first-order components annihilate the linear equations.
inline ReadingChoice select_b1_reading(const QuadraticCoefficients& q, const NormalModeData& nm) {
  const double rc = linear_residual(q, nm.freq, first_order_components(nm, B1Reading::Consistent));
  const double rp = linear_residual(q, nm.freq, first_order_components(nm, B1Reading::Printed));
  return {rc <= rp ? B1Reading::Consistent : B1Reading::Printed, rc, rp};
}

}  // namespace l4norm

#endif  // L4NORM_NORMAL_MODES_HPP
