#ifndef L4NORM_MODEL_HPP
#define L4NORM_MODEL_HPP

// Planar generalized photogravitational restricted three-body problem with
// Poynting-Robertson drag, in the rotating frame with unit primary separation.
// Primary 1 (mass 1 - mu, radiating, mass-reduction factor q1) sits at
// (-mu, 0); primary 2 (mass mu, oblateness A2) sits at (1 - mu, 0).

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "l4norm/errors.hpp"

namespace l4norm {

/// r1, r2 below this radius are treated as a collision with the primary.
inline constexpr double kCollisionRadius = 1e-9;

/// Perturbation strengths above this level trigger a warning: every series in
/// the library is first order in epsilon, A2 and W1.
inline constexpr double kSmallParameterWarning = 0.1;

class ModelParams {
 public:
  /// Physical parameterisation. W1 = (1 - mu)(1 - q1) / cd.
  static ModelParams make(double mu, double q1, double A2, double cd) {
    check_common(mu, A2);
    if (!(q1 > 0.0) || !(q1 <= 1.0) || !std::isfinite(q1)) {
      throw ParameterError(fmt::format(
          "q1 = {} violates 0 < q1 <= 1 (radiation only reduces gravity)", q1));
    }
    if (!(cd > 0.0) || std::isnan(cd)) {
      throw ParameterError(fmt::format("cd = {} must be positive", cd));
    }
    const double w1 = std::isinf(cd) ? 0.0 : (1.0 - mu) * (1.0 - q1) / cd;
    return ModelParams(mu, q1, A2, w1, cd);
  }

  /// Perturbative parameterisation with the drag strength W1 set directly.
  /// Used to switch epsilon, A2 and W1 on one at a time; cd is left unset.
  static ModelParams perturbed(double mu, double epsilon, double A2, double W1) {
    check_common(mu, A2);
    if (!(epsilon >= 0.0) || !(epsilon < 1.0)) {
      throw ParameterError(
          fmt::format("epsilon = {} violates 0 <= epsilon < 1", epsilon));
    }
    if (!(W1 >= 0.0) || !std::isfinite(W1)) {
      throw ParameterError(fmt::format("W1 = {} must be finite and >= 0", W1));
    }
    return ModelParams(mu, 1.0 - epsilon, A2, W1, std::nullopt);
  }

  /// q1 from the particle's radiation-pressure efficiency chi, radius a and
  /// density rho (CGS): q1 = 1 - 5.6e-5 chi / (a rho).
  static ModelParams from_particle(double mu, double chi, double radius,
                                   double density, double A2, double cd) {
    if (!(radius > 0.0) || !(density > 0.0) || !(chi >= 0.0)) {
      throw ParameterError("particle radius and density must be positive, chi >= 0");
    }
    ModelParams p = make(mu, 1.0 - 5.6e-5 * chi / (radius * density), A2, cd);
    p.particle_ = Particle{chi, radius, density};
    return p;
  }

  struct Particle {
    double chi;
    double radius;
    double density;
  };

  double mu() const noexcept { return mu_; }
  double q1() const noexcept { return q1_; }
  double epsilon() const noexcept { return 1.0 - q1_; }
  double A2() const noexcept { return A2_; }
  double W1() const noexcept { return W1_; }
  std::optional<double> cd() const noexcept { return cd_; }
  std::optional<Particle> particle() const noexcept { return particle_; }
  double n() const noexcept { return std::sqrt(n2()); }
  double n2() const noexcept { return 1.0 + 1.5 * A2_; }
  double gamma() const noexcept { return 1.0 - 2.0 * mu_; }
  double delta() const noexcept { return std::cbrt(q1_); }

  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  ModelParams(double mu, double q1, double A2, double W1, std::optional<double> cd)
      : mu_(mu), q1_(q1), A2_(A2), W1_(W1), cd_(cd) {
    if (epsilon() > kSmallParameterWarning) {
      warnings_.push_back(fmt::format("epsilon = {} exceeds {}; first-order series may be inaccurate",
                                      epsilon(), kSmallParameterWarning));
    }
    if (A2_ > kSmallParameterWarning) {
      warnings_.push_back(fmt::format("A2 = {} exceeds {}; first-order series may be inaccurate",
                                      A2_, kSmallParameterWarning));
    }
    if (W1_ > kSmallParameterWarning) {
      warnings_.push_back(fmt::format("W1 = {} exceeds {}; first-order series may be inaccurate",
                                      W1_, kSmallParameterWarning));
    }
  }

  static void check_common(double mu, double A2) {
    if (!(mu > 0.0) || !(mu <= 0.5)) {
      throw ParameterError(fmt::format("mu = {} violates 0 < mu <= 1/2", mu));
    }
    if (!(A2 >= 0.0) || !std::isfinite(A2)) {
      throw ParameterError(fmt::format("A2 = {} must be finite and >= 0", A2));
    }
  }

  double mu_;
  double q1_;
  double A2_;
  double W1_;
  std::optional<double> cd_;
  std::optional<Particle> particle_;
  std::vector<std::string> warnings_;
};

/// Rotating-frame position and velocity.
template <class Real>
struct BasicState {
  Real x{}, y{}, xdot{}, ydot{};
};
using State = BasicState<double>;

/// Position and canonical momenta.
template <class Real>
struct BasicCanonicalState {
  Real x{}, y{}, px{}, py{};
};
using CanonicalState = BasicCanonicalState<double>;

template <class Real>
struct Vec2 {
  Real x{}, y{};
};

/// Symmetric 2x2 matrix (xx, xy, yy).
template <class Real>
struct Sym2 {
  Real xx{}, xy{}, yy{};
};

namespace detail {

template <class Real>
struct Distances {
  Real u1, u2, y, r1sq, r2sq, r1, r2;
};

template <class Real>
Distances<Real> distances(const Real& x, const Real& y, const ModelParams& p) {
  using std::sqrt;
  const Real mu(p.mu());
  Distances<Real> d{x + mu, x + mu - Real(1), y, Real(0), Real(0), Real(0), Real(0)};
  d.r1sq = d.u1 * d.u1 + y * y;
  d.r2sq = d.u2 * d.u2 + y * y;
  d.r1 = sqrt(d.r1sq);
  d.r2 = sqrt(d.r2sq);
  if (d.r1 < Real(kCollisionRadius)) {
    throw CollisionError("collision with primary 1 (mass 1 - mu): r1 below guard radius");
  }
  if (d.r2 < Real(kCollisionRadius)) {
    throw CollisionError("collision with primary 2 (mass mu): r2 below guard radius");
  }
  return d;
}

template <class Real>
Real mean_motion(const ModelParams& p) {
  using std::sqrt;
  return sqrt(Real(1) + Real(3) / Real(2) * Real(p.A2()));
}

}  // namespace detail

/// U1 = n^2 (x^2 + y^2)/2 + (1 - mu) q1 / r1 + mu / r2 + mu A2 / (2 r2^3).
template <class Real>
Real effective_potential(const BasicState<Real>& s, const ModelParams& p) {
  const auto d = detail::distances(s.x, s.y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real mu(p.mu());
  return n * n * (s.x * s.x + s.y * s.y) / Real(2) +
         (Real(1) - mu) * Real(p.q1()) / d.r1 + mu / d.r2 +
         mu * Real(p.A2()) / (Real(2) * d.r2 * d.r2sq);
}

/// Gradient of U1.
template <class Real>
Vec2<Real> potential_gradient(const Real& x, const Real& y, const ModelParams& p) {
  const auto d = detail::distances(x, y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real mu(p.mu());
  const Real k1 = (Real(1) - mu) * Real(p.q1());
  const Real c = mu * Real(p.A2()) / Real(2);
  const Real r1c = d.r1 * d.r1sq;
  const Real r2c = d.r2 * d.r2sq;
  const Real r2q = r2c * d.r2sq;
  const Real radial = k1 / r1c;
  const Real radial2 = mu / r2c + Real(3) * c / r2q;
  return {n * n * x - radial * d.u1 - radial2 * d.u2,
          n * n * y - radial * y - radial2 * y};
}

/// Hessian of U1.
template <class Real>
Sym2<Real> potential_hessian(const Real& x, const Real& y, const ModelParams& p) {
  const auto d = detail::distances(x, y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real mu(p.mu());
  const Real k1 = (Real(1) - mu) * Real(p.q1());
  const Real c = mu * Real(p.A2()) / Real(2);
  const Real r1_5 = d.r1sq * d.r1sq * d.r1;
  const Real r2_5 = d.r2sq * d.r2sq * d.r2;
  const Real r2_7 = r2_5 * d.r2sq;
  auto block = [](const Real& ux, const Real& uy, const Real& rsq, const Real& a,
                  const Real& b) {
    // a (3 u u^T - r^2 I) + b (15 u u^T - 3 r^2 I)
    return Sym2<Real>{a * (Real(3) * ux * ux - rsq) + b * (Real(15) * ux * ux - Real(3) * rsq),
                      a * Real(3) * ux * uy + b * Real(15) * ux * uy,
                      a * (Real(3) * uy * uy - rsq) + b * (Real(15) * uy * uy - Real(3) * rsq)};
  };
  const auto h1 = block(d.u1, y, d.r1sq, k1 / r1_5, Real(0));
  const auto h2 = block(d.u2, y, d.r2sq, mu / r2_5, c / r2_7);
  return {n * n + h1.xx + h2.xx, h1.xy + h2.xy, n * n + h1.yy + h2.yy};
}

/// Drag bracket terms N1, N2 as printed with the equations of motion.
template <class Real>
Vec2<Real> drag_factors(const BasicState<Real>& s, const ModelParams& p) {
  const auto d = detail::distances(s.x, s.y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real radial = (d.u1 * s.xdot + s.y * s.ydot) / d.r1sq;
  return {d.u1 * radial + s.xdot - n * s.y, s.y * radial + s.ydot + n * d.u1};
}

/// Generalised force (Ux, Uy) = grad U1 - W1 (N1, N2) / r1^2.
template <class Real>
Vec2<Real> generalized_force(const BasicState<Real>& s, const ModelParams& p) {
  const auto d = detail::distances(s.x, s.y, p);
  const auto g = potential_gradient(s.x, s.y, p);
  const auto nn = drag_factors(s, p);
  const Real w(p.W1());
  return {g.x - w * nn.x / d.r1sq, g.y - w * nn.y / d.r1sq};
}

/// Accelerations (xddot, yddot) from xddot - 2n ydot = Ux, yddot + 2n xdot = Uy.
template <class Real>
Vec2<Real> eom_rhs(const BasicState<Real>& s, const ModelParams& p) {
  const Real n = detail::mean_motion<Real>(p);
  const auto f = generalized_force(s, p);
  return {Real(2) * n * s.ydot + f.x, -Real(2) * n * s.xdot + f.y};
}

/// Force at rest (zero velocity) and its Jacobian; the equilibrium conditions.
template <class Real>
Vec2<Real> rest_force(const Real& x, const Real& y, const ModelParams& p) {
  return generalized_force(BasicState<Real>{x, y, Real(0), Real(0)}, p);
}

template <class Real>
std::array<Real, 4> rest_force_jacobian(const Real& x, const Real& y, const ModelParams& p) {
  const auto d = detail::distances(x, y, p);
  const auto h = potential_hessian(x, y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real nw = n * Real(p.W1());
  const Real r4 = d.r1sq * d.r1sq;
  // drag at rest: (n W1 y / r1^2, -n W1 u1 / r1^2)
  const Real fxx = -Real(2) * nw * y * d.u1 / r4;
  const Real fxy = nw * (Real(1) / d.r1sq - Real(2) * y * y / r4);
  const Real fyx = -nw * (Real(1) / d.r1sq - Real(2) * d.u1 * d.u1 / r4);
  const Real fyy = Real(2) * nw * d.u1 * y / r4;
  return {h.xx + fxx, h.xy + fxy, h.xy + fyx, h.yy + fyy};
}

namespace detail {
template <class Real>
Real drag_angle(const Real& x, const Real& y, const ModelParams& p) {
  using std::atan2;
  const Real u1 = x + Real(p.mu());
  if (y == Real(0) && u1 < Real(0)) {
    throw BranchCutError("drag potential angle evaluated on its branch cut (y = 0, x + mu < 0)");
  }
  return atan2(y, u1);
}
}  // namespace detail

/// L = T + Coriolis + U1 + W1 {[(x+mu) xdot + y ydot]/(2 r1^2) - n angle(y, x+mu)}.
template <class Real>
Real lagrangian(const BasicState<Real>& s, const ModelParams& p) {
  const auto d = detail::distances(s.x, s.y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real theta = detail::drag_angle(s.x, s.y, p);
  const Real kinetic = (s.xdot * s.xdot + s.ydot * s.ydot) / Real(2);
  const Real coriolis = n * (s.x * s.ydot - s.xdot * s.y);
  const Real drag = Real(p.W1()) *
                    ((d.u1 * s.xdot + s.y * s.ydot) / (Real(2) * d.r1sq) - n * theta);
  return kinetic + coriolis + effective_potential(s, p) + drag;
}

template <class Real>
BasicCanonicalState<Real> momenta(const BasicState<Real>& s, const ModelParams& p) {
  const auto d = detail::distances(s.x, s.y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real half_w = Real(p.W1()) / (Real(2) * d.r1sq);
  return {s.x, s.y, s.xdot - n * s.y + half_w * d.u1, s.ydot + n * s.x + half_w * s.y};
}

/// Inverse of momenta().
template <class Real>
BasicState<Real> velocities(const BasicCanonicalState<Real>& c, const ModelParams& p) {
  const auto d = detail::distances(c.x, c.y, p);
  const Real n = detail::mean_motion<Real>(p);
  const Real half_w = Real(p.W1()) / (Real(2) * d.r1sq);
  return {c.x, c.y, c.px + n * c.y - half_w * d.u1, c.py - n * c.x - half_w * c.y};
}

/// H = -L + px xdot + py ydot at the given canonical point.
template <class Real>
Real hamiltonian(const BasicCanonicalState<Real>& c, const ModelParams& p) {
  const auto s = velocities(c, p);
  return -lagrangian(s, p) + c.px * s.xdot + c.py * s.ydot;
}

/// Energy integral h = (xdot^2 + ydot^2)/2 - U1 + n W1 angle; with W1 = 0 this
/// is the Jacobi-type integral (xdot^2 + ydot^2)/2 - U1.
template <class Real>
Real energy_integral(const BasicState<Real>& s, const ModelParams& p) {
  const Real n = detail::mean_motion<Real>(p);
  Real h = (s.xdot * s.xdot + s.ydot * s.ydot) / Real(2) - effective_potential(s, p);
  if (p.W1() != 0.0) h += n * Real(p.W1()) * detail::drag_angle(s.x, s.y, p);
  return h;
}

}  // namespace l4norm

#endif  // L4NORM_MODEL_HPP
