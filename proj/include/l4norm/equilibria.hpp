#ifndef L4NORM_EQUILIBRIA_HPP
#define L4NORM_EQUILIBRIA_HPP

#include <algorithm>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

#include "l4norm/errors.hpp"
#include "l4norm/model.hpp"

namespace l4norm {

enum class Branch { L4, L5 };
enum class EquilibriumMethod { Numeric, Series, EpsilonForm };

constexpr std::string_view to_string(Branch b) noexcept { return b == Branch::L4 ? "L4" : "L5"; }

constexpr std::string_view to_string(EquilibriumMethod m) noexcept {
  switch (m) {
    case EquilibriumMethod::Numeric: return "numeric";
    case EquilibriumMethod::Series: return "series";
    case EquilibriumMethod::EpsilonForm: return "epsilon-form";
  }
  return "?";
}

struct EquilibriumPoint {
  double x = 0.0;
  double y = 0.0;
  Branch branch = Branch::L4;
  EquilibriumMethod method = EquilibriumMethod::Numeric;
  /// max(|Ux|, |Uy|) at the point with zero velocity.
  double residual = 0.0;
};

/// Displacement of the triangular point from primary 1: a = x* + mu, b = y*.
struct OriginShift {
  double a = 0.0;
  double b = 0.0;

  static OriginShift from_point(const EquilibriumPoint& pt, const ModelParams& p) {
    return {pt.x + p.mu(), pt.y};
  }
};

inline double rest_residual(double x, double y, const ModelParams& p) {
  const auto f = rest_force(x, y, p);
  return std::max(std::abs(f.x), std::abs(f.y));
}

inline constexpr int kNewtonMaxIterations = 100;
inline constexpr double kEquilibriumTolerance = 1e-12;

/// Newton iteration on the zero-velocity force field, seeded at the classical
/// point (1/2 - mu, +-sqrt(3)/2).
inline EquilibriumPoint solve_triangular_numeric(const ModelParams& p, Branch branch) {
  const double sign = branch == Branch::L4 ? 1.0 : -1.0;
  double x = 0.5 - p.mu();
  double y = sign * std::sqrt(3.0) / 2.0;
  for (int it = 0; it < kNewtonMaxIterations; ++it) {
    const auto f = rest_force(x, y, p);
    const double res = std::max(std::abs(f.x), std::abs(f.y));
    const auto j = rest_force_jacobian(x, y, p);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (std::abs(det) < 1e-14) {
      throw SingularityError(fmt::format(
          "degenerate force Jacobian (det = {:.3e}) at ({:.17g}, {:.17g})", det, x, y));
    }
    const double dx = (j[3] * f.x - j[1] * f.y) / det;
    const double dy = (-j[2] * f.x + j[0] * f.y) / det;
    x -= dx;
    y -= dy;
    if (res < 1e-15 || std::max(std::abs(dx), std::abs(dy)) < 1e-16) break;
  }
  const double res = rest_residual(x, y, p);
  if (!(res < kEquilibriumTolerance) || y * sign <= 0.0) {
    throw ConvergenceError(fmt::format(
        "Newton did not converge after {} iterations; last iterate ({:.17g}, {:.17g}), "
        "residual {:.3e}",
        kNewtonMaxIterations, x, y, res));
  }
  return {x, y, branch, EquilibriumMethod::Numeric, res};
}

/// Perturbation series for x*, y* built on the photogravitational point
/// x0 = delta^2/2 - mu, y0 = +-delta (1 - delta^2/4)^(1/2), delta = q1^(1/3).
/// Evaluated exactly as printed, including operator grouping under the root.
inline EquilibriumPoint triangular_series(const ModelParams& p, Branch branch) {
  const double mu = p.mu();
  if (mu * (1.0 - mu) == 0.0) {
    throw SingularityError("triangular series has mu (1 - mu) denominators");
  }
  const double A2 = p.A2();
  const double nW1 = p.n() * p.W1();
  const double delta = p.delta();
  const double d2 = delta * delta;
  const double hd2 = d2 / 2.0;
  const double x0 = hd2 - mu;
  const double y0 = (branch == Branch::L4 ? 1.0 : -1.0) * delta * std::sqrt(1.0 - d2 / 4.0);
  if (x0 == 0.0 || y0 == 0.0) throw SingularityError("x0 or y0 vanishes in the triangular series");

  const double x_bracket = (1.0 - mu) * (1.0 + 2.5 * A2) + mu * (1.0 - A2 / 2.0) * hd2;
  const double x = x0 * (1.0 - nW1 * x_bracket / (3.0 * mu * (1.0 - mu) * y0 * x0) -
                         hd2 * A2 / x0);

  const double y_bracket =
      2.0 * mu - 1.0 - mu * (1.0 - 1.5 * A2) * hd2 + 7.0 * (1.0 - mu) * A2 / 2.0;
  const double radicand = 1.0 - nW1 * d2 * y_bracket / (3.0 * mu * (1.0 - mu) * y0 * y0 * y0) -
                          d2 * (1.0 - hd2) * A2 / (y0 * y0);
  if (radicand < 0.0) {
    throw ParameterError(fmt::format("y* series radicand is negative ({:.3e})", radicand));
  }
  const double y = y0 * std::sqrt(radicand);
  return {x, y, branch, EquilibriumMethod::Series, rest_residual(x, y, p)};
}

namespace detail {
struct EpsilonFormL4 {
  double x, y;
};
// L4 expansion in gamma = 1 - 2 mu, epsilon = 1 - q1, A2 and n W1.
inline EpsilonFormL4 epsilon_form_l4(double mu, double eps, double A2, double nW1) {
  const double g = 1.0 - 2.0 * mu;
  const double s3 = std::sqrt(3.0);
  const double x = g / 2.0 - eps / 3.0 - A2 / 2.0 + A2 * eps / 3.0 -
                   (9.0 + g) / (6.0 * s3) * nW1 - 4.0 * g * eps / (27.0 * s3) * nW1;
  const double y = s3 / 2.0 *
                   (1.0 - 2.0 * eps / 9.0 - A2 / 3.0 - 2.0 * A2 * eps / 9.0 +
                    (1.0 + g) / (9.0 * s3) * nW1 - 4.0 * g * eps / (27.0 * s3) * nW1);
  return {x, y};
}
}  // namespace detail

/// First-order expansion of the triangular point in (epsilon, A2, n W1).
/// The printed expansion is for L4; L5 uses the exact mirror symmetry of the
/// zero-velocity force field, (x, y; W1) -> (x, -y; -W1).
inline EquilibriumPoint epsilon_form(const ModelParams& p, Branch branch) {
  const double sign = branch == Branch::L4 ? 1.0 : -1.0;
  const auto e = detail::epsilon_form_l4(p.mu(), p.epsilon(), p.A2(), sign * p.n() * p.W1());
  const double y = sign * e.y;
  return {e.x, y, branch, EquilibriumMethod::EpsilonForm, rest_residual(e.x, y, p)};
}

/// Origin shift (a, b) to L4 evaluated exactly as printed.
inline OriginShift offset_ab(const ModelParams& p) {
  const double g = p.gamma();
  const double eps = p.epsilon();
  const double A2 = p.A2();
  const double nW1 = p.n() * p.W1();
  const double s3 = std::sqrt(3.0);
  const double a = 0.5 * (-2.0 * eps / 3.0 - A2 + 2.0 * A2 * eps / 3.0 -
                          (9.0 + g) / (3.0 * s3) * nW1 - 8.0 * g * eps / (27.0 * s3) * nW1);
  const double b = s3 / 2.0 *
                   (1.0 - 2.0 * eps / 9.0 - A2 / 3.0 - 2.0 * A2 * eps / 9.0 +
                    (1.0 + g) / (9.0 * s3) * nW1 - 4.0 * g * eps / (27.0 * s3) * nW1);
  return {a, b};
}

}  // namespace l4norm

#endif  // L4NORM_EQUILIBRIA_HPP
