#ifndef L4NORM_SECOND_ORDER_HPP
#define L4NORM_SECOND_ORDER_HPP

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "l4norm/dalembert.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/normal_modes.hpp"
#include "l4norm/poly.hpp"
#include "l4norm/tables.hpp"
#include "l4norm/taylor.hpp"

namespace l4norm {

inline DAlembertSeries series_one() {
  DAlembertSeries one;
  one.add(0, 0, 0, 0, 1.0, 0.0);
  return one;
}

/// Substitutes (x, y, Dx, Dy) into a polynomial in (xi, eta, xidot, etadot).
inline DAlembertSeries substitute(const TruncatedPoly& poly, const DAlembertSeries& x,
                                  const DAlembertSeries& y, const FrequencyPair& w) {
  const std::array<DAlembertSeries, 4> args{x, y, apply_D(x, w), apply_D(y, w)};
  return compose(poly, args, series_one());
}

struct Forcing {
  DAlembertSeries X2;
  DAlembertSeries Y2;
};

/// Right sides of the second-order equations: the Euler-Lagrange expression of
/// L3 evaluated on the first-order solution,
///   X2 = dL3/dxi - D dL3/dxidot,  Y2 = dL3/deta - D dL3/detadot.
/// For a position-only L3 this is the plain gradient.
inline Forcing forcing_x2y2(const TruncatedPoly& l3, const FirstOrder& b1, const FrequencyPair& w) {
  const auto cubic = l3.slice(3);
  auto part = [&](int pos, int vel) {
    auto f = substitute(cubic.derivative(pos), b1.x, b1.y, w);
    f -= apply_D(substitute(cubic.derivative(vel), b1.x, b1.y, w), w);
    return f.degree_part(2);
  };
  return {part(kXi, kXiDot), part(kEta, kEtaDot)};
}

struct SecondOrderSolution {
  SecondOrder B2;
  DAlembertSeries Phi;
  DAlembertSeries Psi;
  /// Left side minus right side of each second-order equation.
  DAlembertSeries residual_x;
  DAlembertSeries residual_y;
  double residual = 0.0;
  /// Largest forcing coefficient, the scale for the residual tolerance.
  double scale = 0.0;
};

inline void require_no_critical(const DAlembertSeries& s, const char* name) {
  for (const auto& [k, c] : s.terms()) {
    if (is_critical(k.p, k.q) && (std::abs(c.C) > kCriticalTolerance || std::abs(c.S) > kCriticalTolerance)) {
      throw CriticalTermError(fmt::format(
          "{} carries the critical harmonic (p={}, q={}) at (j={}, m={}): C={:.3e}, S={:.3e}", name, k.p,
          k.q, k.j, k.m, c.C, c.S));
    }
  }
}

/// Phi = (D^2 + b) X2 + (gyro D - G) Y2, Psi = (gyro D + G) X2 - (D^2 + a) Y2,
/// then Delta1 Delta2 B2x = Phi and Delta1 Delta2 B2y = -Psi harmonic by harmonic.
inline SecondOrderSolution solve_second_order_oracle(const QuadraticCoefficients& q,
                                                     const FrequencyPair& w, const Forcing& f,
                                                     double floor = kDivisorFloor) {
  require_no_critical(f.X2, "X2");
  require_no_critical(f.Y2, "Y2");
  SecondOrderSolution s;
  const auto dX = apply_D(f.X2, w), dY = apply_D(f.Y2, w);
  s.Phi = apply_D(dX, w) + f.X2 * q.b() + dY * q.gyro - f.Y2 * q.G;
  s.Psi = dX * q.gyro + f.X2 * q.G - apply_D(dY, w) - f.Y2 * q.a();
  s.B2.x = invert_delta(s.Phi, w, floor);
  s.B2.y = invert_delta(-s.Psi, w, floor);
  const auto [lx, ly] = linear_operator(q, w, s.B2.x, s.B2.y);
  s.residual_x = lx - f.X2;
  s.residual_y = ly - f.Y2;
  s.residual = std::max(s.residual_x.max_abs(), s.residual_y.max_abs());
  s.scale = std::max({1.0, f.X2.max_abs(), f.Y2.max_abs()});
  return s;
}

/// Harmonic blocks of the degree-3 energy along x = B1 + B2.
struct H3NormalCoefficients {
  /// Largest coefficient in the blocks I1^{3/2}, I1 I2^{1/2}, I1^{1/2} I2, I2^{3/2}.
  double A30 = 0.0, A21 = 0.0, A12 = 0.0, A03 = 0.0;
  /// Angle averages of the same blocks; zero by parity for any input.
  double avg30 = 0.0, avg21 = 0.0, avg12 = 0.0, avg03 = 0.0;
  /// Largest coefficient among the two contributions (quadratic energy cross
  /// terms and cubic energy on B1) before they are summed.
  double S = 0.0;
  DAlembertSeries energy3;

  double max_abs() const { return std::max({std::abs(A30), std::abs(A21), std::abs(A12), std::abs(A03)}); }
};

/// The energy of the Lagrangian flow is conserved, so along a correct
/// second-order solution its degree-3 part has no angle dependence; with no
/// constant harmonic at odd degree every coefficient of that part must vanish.
/// lagrangian supplies L2 and L3 (higher slices are ignored).
inline H3NormalCoefficients h3_normal_coefficients(const TruncatedPoly& lagrangian, const FrequencyPair& w,
                                                   const FirstOrder& b1, const SecondOrder& b2) {
  const auto e = energy_polynomial(lagrangian.truncate(3));
  const auto x = b1.x + b2.x, y = b1.y + b2.y;
  const auto cross = substitute(e.slice(2), x, y, w).degree_part(3);
  const auto cubic = substitute(e.slice(3), b1.x, b1.y, w).degree_part(3);
  H3NormalCoefficients h;
  h.energy3 = cross + cubic;
  h.S = std::max(cross.max_abs(), cubic.max_abs());
  auto block = [&](int j, int m, double& amax, double& avg) {
    const auto b = h.energy3.block(j, m);
    amax = b.max_abs();
    avg = b.coeff({j, m, 0, 0}).C;
  };
  block(3, 0, h.A30, h.avg30);
  block(2, 1, h.A21, h.avg21);
  block(1, 2, h.A12, h.avg12);
  block(0, 3, h.A03, h.avg03);
  return h;
}

}  // namespace l4norm

#endif  // L4NORM_SECOND_ORDER_HPP
