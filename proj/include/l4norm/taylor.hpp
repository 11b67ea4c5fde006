#ifndef L4NORM_TAYLOR_HPP
#define L4NORM_TAYLOR_HPP

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "l4norm/equilibria.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/model.hpp"
#include "l4norm/poly.hpp"

namespace l4norm {

inline constexpr int kMaxTaylorDegree = 4;

namespace detail {

struct ExpansionPieces {
  TruncatedPoly potential;  // position part of L, including -n W1 angle
  TruncatedPoly gauge_x;    // coefficient of xidot in the drag term
  TruncatedPoly gauge_y;    // coefficient of etadot in the drag term
};

// r^2 = rho^2 (1 + s) about a point at offset (u, v) from a primary.
inline TruncatedPoly radial_ratio(double u, double v, double rho2, int cap) {
  const auto xi = TruncatedPoly::variable(kXi, cap);
  const auto eta = TruncatedPoly::variable(kEta, cap);
  return (xi * (2.0 * u) + eta * (2.0 * v) + xi * xi + eta * eta) * (1.0 / rho2);
}

inline ExpansionPieces expansion_pieces(const ModelParams& p, const OriginShift& shift, int cap) {
  if (cap < 0 || cap > kMaxTaylorDegree) {
    throw ParameterError(
        fmt::format("Taylor degree {} outside the supported range 0..{}", cap, kMaxTaylorDegree));
  }
  const double mu = p.mu();
  const double n = p.n();
  const double a = shift.a;
  const double b = shift.b;
  const double xs = a - mu;
  const double rho1sq = a * a + b * b;
  const double u2 = a - 1.0;
  const double rho2sq = u2 * u2 + b * b;
  if (std::sqrt(rho1sq) < kCollisionRadius || std::sqrt(rho2sq) < kCollisionRadius) {
    throw CollisionError(fmt::format(
        "expansion point ({:.17g}, {:.17g}) lies within the collision radius of a primary", xs, b));
  }

  const auto xi = TruncatedPoly::variable(kXi, cap);
  const auto eta = TruncatedPoly::variable(kEta, cap);
  const auto s1 = radial_ratio(a, b, rho1sq, cap);
  const auto s2 = radial_ratio(u2, b, rho2sq, cap);
  const double rho1 = std::sqrt(rho1sq);
  const double rho2 = std::sqrt(rho2sq);

  const auto inv_r1 = binomial_series(s1, -0.5) * (1.0 / rho1);
  const auto inv_r1sq = binomial_series(s1, -1.0) * (1.0 / rho1sq);
  const auto inv_r2 = binomial_series(s2, -0.5) * (1.0 / rho2);
  const auto inv_r2cube = binomial_series(s2, -1.5) * (1.0 / (rho2sq * rho2));

  const auto x = TruncatedPoly::constant(xs, cap) + xi;
  const auto y = TruncatedPoly::constant(b, cap) + eta;
  TruncatedPoly v = (x * x + y * y) * (0.5 * n * n);
  v += inv_r1 * ((1.0 - mu) * p.q1());
  v += inv_r2 * mu;
  v += inv_r2cube * (mu * p.A2() / 2.0);

  const double w1 = p.W1();
  TruncatedPoly gx(cap), gy(cap);
  if (w1 != 0.0) {
    // angle(y, x + mu) = angle0 + Im log(1 + w), w = (xi + i eta) / (a + i b)
    const double theta0 = detail::drag_angle(xs, b, p);
    const auto wr = (xi * a + eta * b) * (1.0 / rho1sq);
    const auto wi = (eta * a - xi * b) * (1.0 / rho1sq);
    auto pr = TruncatedPoly::constant(1.0, cap);
    TruncatedPoly pi(cap);
    auto theta = TruncatedPoly::constant(theta0, cap);
    for (int k = 1; k <= cap; ++k) {
      const auto nr = pr * wr - pi * wi;
      const auto ni = pr * wi + pi * wr;
      pr = nr;
      pi = ni;
      theta += pi * ((k % 2 == 1 ? 1.0 : -1.0) / k);
    }
    v -= theta * (w1 * n);
    const auto u1 = TruncatedPoly::constant(a, cap) + xi;
    gx = u1 * inv_r1sq * (0.5 * w1);
    gy = y * inv_r1sq * (0.5 * w1);
  }
  return {v, gx, gy};
}

}  // namespace detail

/// Taylor expansion of the Lagrangian about (x*, y*, 0, 0), x* = a - mu,
/// y* = b, truncated at total degree N, by composition of truncated series.
inline TruncatedPoly taylor_lagrangian(const ModelParams& p, const OriginShift& shift, int N) {
  const auto pieces = detail::expansion_pieces(p, shift, N);
  const double n = p.n();
  const double xs = shift.a - p.mu();
  const auto xi = TruncatedPoly::variable(kXi, N);
  const auto eta = TruncatedPoly::variable(kEta, N);
  const auto xd = TruncatedPoly::variable(kXiDot, N);
  const auto yd = TruncatedPoly::variable(kEtaDot, N);
  const auto x = TruncatedPoly::constant(xs, N) + xi;
  const auto y = TruncatedPoly::constant(shift.b, N) + eta;

  TruncatedPoly l = (xd * xd + yd * yd) * 0.5;
  l += (x * yd - xd * y) * n;
  l += pieces.potential;
  l += pieces.gauge_x * xd + pieces.gauge_y * yd;
  return l;
}

/// Hamiltonian about the same point in (xi, eta, pi_x, pi_y), pi the momentum
/// displacement: H = |pi - A(xi)|^2 / 2 - V(xi), A the vector potential minus
/// its value at the expansion point.
inline TruncatedPoly hamiltonian_oracle(const ModelParams& p, const OriginShift& shift, int N) {
  const auto pieces = detail::expansion_pieces(p, shift, N);
  const double n = p.n();
  const auto xi = TruncatedPoly::variable(kXi, N);
  const auto eta = TruncatedPoly::variable(kEta, N);
  const auto px = TruncatedPoly::variable(kXiDot, N);
  const auto py = TruncatedPoly::variable(kEtaDot, N);
  auto ax = eta * (-n) + pieces.gauge_x;
  auto ay = xi * n + pieces.gauge_y;
  ax.add_term({0, 0, 0, 0}, -pieces.gauge_x.coeff({0, 0, 0, 0}));
  ay.add_term({0, 0, 0, 0}, -pieces.gauge_y.coeff({0, 0, 0, 0}));
  const auto kx = px - ax;
  const auto ky = py - ay;
  return (kx * kx + ky * ky) * 0.5 - pieces.potential;
}

/// Degree-3 Hamiltonian term obtained from a Lagrangian polynomial by the
/// Legendre substitution v = pi - A1(xi), A1 the linear vector potential.
inline TruncatedPoly hamiltonian_cubic_from_lagrangian(const TruncatedPoly& lagrangian) {
  const int cap = lagrangian.degree_cap();
  if (cap < 3) throw ContractError("Lagrangian must carry degree 3");
  const auto l2 = lagrangian.slice(2);
  const auto a1x = l2.derivative(kXiDot).velocity_slice(0);
  const auto a1y = l2.derivative(kEtaDot).velocity_slice(0);
  const std::array<TruncatedPoly, 4> args{
      TruncatedPoly::variable(kXi, cap), TruncatedPoly::variable(kEta, cap),
      TruncatedPoly::variable(kXiDot, cap) - a1x, TruncatedPoly::variable(kEtaDot, cap) - a1y};
  const auto l3 = compose(lagrangian.slice(3), args, TruncatedPoly::constant(1.0, cap));
  return -l3.slice(3);
}

/// Coefficients of the linearised Lagrange equations
///   xddot - gyro etadot + (2E - n^2) xi + G eta = ...
///   etaddot + gyro xidot + (2F - n^2) eta + G xi = ...
/// plus the symmetric velocity coupling K (pi = v + K xi) of the quadratic part.
struct QuadraticCoefficients {
  double E = 0.0;
  double F = 0.0;
  double G = 0.0;
  double gyro = 0.0;
  double n = 1.0;
  std::array<double, 4> K{};  // row-major: pi_x = v_x + K0 xi + K1 eta, pi_y = ...

  double a() const noexcept { return 2.0 * E - n * n; }
  double b() const noexcept { return 2.0 * F - n * n; }
};

inline QuadraticCoefficients extract_EFG(const TruncatedPoly& l2, const ModelParams& p) {
  for (const auto& kv : l2.terms()) {
    if (total_degree(kv.first) != 2) {
      throw ContractError(fmt::format("extract_EFG expects a homogeneous quadratic; found a degree-{} term",
                                      total_degree(kv.first)));
    }
  }
  QuadraticCoefficients q;
  q.n = p.n();
  const double n2 = q.n * q.n;
  q.E = (n2 - 2.0 * l2.coeff({2, 0, 0, 0})) / 2.0;
  q.F = (n2 - 2.0 * l2.coeff({0, 2, 0, 0})) / 2.0;
  q.G = -l2.coeff({1, 1, 0, 0});
  const double c_xi_etadot = l2.coeff({1, 0, 0, 1});
  const double c_eta_xidot = l2.coeff({0, 1, 1, 0});
  q.gyro = c_xi_etadot - c_eta_xidot;
  q.K = {l2.coeff({1, 0, 1, 0}), c_eta_xidot, c_xi_etadot, l2.coeff({0, 1, 0, 1})};
  return q;
}

/// Linear Lagrange equations of a quadratic Lagrangian as coefficient rows
/// over (xi, eta, xidot, etadot, xiddot, etaddot).
using LinearEquations = std::array<std::array<double, 6>, 2>;

inline LinearEquations linearized_euler_lagrange(const TruncatedPoly& l2) {
  LinearEquations eq{};
  // d/dt dL/dv_i - dL/dq_i for L = sum of quadratic monomials
  auto second = [&](int i, int j) {
    Exponent e{0, 0, 0, 0};
    e[static_cast<std::size_t>(i)] += 1;
    e[static_cast<std::size_t>(j)] += 1;
    return l2.coeff(e) * (i == j ? 2.0 : 1.0);
  };
  for (int i = 0; i < 2; ++i) {
    const int vi = i + 2;
    auto& row = eq[static_cast<std::size_t>(i)];
    for (int j = 0; j < 2; ++j) {
      row[static_cast<std::size_t>(4 + j)] += second(vi, j + 2);
      row[static_cast<std::size_t>(2 + j)] += second(vi, j);
      row[static_cast<std::size_t>(2 + j)] -= second(i, j + 2);
      row[static_cast<std::size_t>(j)] -= second(i, j);
    }
  }
  return eq;
}

inline LinearEquations lgeq_left_side(const QuadraticCoefficients& q) {
  LinearEquations eq{};
  eq[0] = {q.a(), q.G, 0.0, -q.gyro, 1.0, 0.0};
  eq[1] = {q.G, q.b(), q.gyro, 0.0, 0.0, 1.0};
  return eq;
}

}  // namespace l4norm

#endif  // L4NORM_TAYLOR_HPP
