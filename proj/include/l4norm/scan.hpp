#ifndef L4NORM_SCAN_HPP
#define L4NORM_SCAN_HPP

#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "l4norm/dalembert.hpp"
#include "l4norm/equilibria.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/model.hpp"
#include "l4norm/normal_modes.hpp"
#include "l4norm/taylor.hpp"

namespace l4norm {

/// Frequencies of the linearised flow about the numeric triangular point.
inline FrequencyPair linear_frequencies(const ModelParams& p, Branch branch = Branch::L4) {
  const auto root = solve_triangular_numeric(p, branch);
  const auto l2 = taylor_lagrangian(p, OriginShift::from_point(root, p), 2).slice(2);
  return frequencies(p, extract_EFG(l2, p));
}

using ParamsAt = std::function<ModelParams(double mu)>;

/// Evaluates f(i) for i in [0, n) concurrently; results keep input order.
template <class F>
auto ordered_parallel(std::size_t n, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  std::vector<std::future<decltype(f(std::size_t{0}))>> fut;
  fut.reserve(n);
  for (std::size_t i = 0; i < n; ++i) fut.push_back(std::async(std::launch::async, f, i));
  std::vector<decltype(f(std::size_t{0}))> out;
  out.reserve(n);
  for (auto& x : fut) out.push_back(x.get());
  return out;
}

/// Evenly spaced grid; empty when steps == 0 or the range is inverted.
inline std::vector<double> mu_grid(double mu_min, double mu_max, int steps) {
  std::vector<double> g;
  if (steps <= 0 || mu_min > mu_max) return g;
  if (steps == 1) return {mu_min};
  for (int i = 0; i < steps; ++i) {
    g.push_back(mu_min + (mu_max - mu_min) * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  return g;
}

struct ScanRow {
  double mu = 0.0;
  bool stable = false;
  FrequencyPair w;
  MoserReport moser;
};

/// Resonance k1 omega1 + k2 omega2 = 0 located by bisection.
struct ResonanceCrossing {
  int k1 = 0;
  int k2 = 0;
  double mu = 0.0;
  FrequencyPair w;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<ResonanceCrossing> crossings;
  bool any_unstable = false;
};

/// Pairs with k1 > 0 > k2, |k1| + |k2| <= 4, in lowest terms; the only ones
/// that can vanish for positive frequencies.
inline std::vector<std::pair<int, int>> resonance_pairs() {
  std::vector<std::pair<int, int>> out;
  for (int k1 = 1; k1 < kMoserOrder; ++k1) {
    for (int k2 = -1; k1 - k2 <= kMoserOrder; --k2) {
      if (std::gcd(k1, -k2) == 1) out.emplace_back(k1, k2);
    }
  }
  return out;
}

inline constexpr double kBisectionTolerance = 1e-10;

inline ScanRow scan_point(const ParamsAt& at, double mu) {
  ScanRow r;
  r.mu = mu;
  try {
    r.w = linear_frequencies(at(mu));
    r.stable = true;
    r.moser = moser_check(r.w);
  } catch (const StabilityDomainError&) {
    r.stable = false;
  }
  return r;
}

inline ScanResult resonance_scan(const ParamsAt& at, double mu_min, double mu_max, int steps) {
  ScanResult s;
  const auto grid = mu_grid(mu_min, mu_max, steps);
  s.rows = ordered_parallel(grid.size(), [&](std::size_t i) { return scan_point(at, grid[i]); });
  for (const auto& r : s.rows) s.any_unstable = s.any_unstable || !r.stable;
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    const auto& a = s.rows[i - 1];
    const auto& b = s.rows[i];
    if (!a.stable || !b.stable) continue;
    for (auto [k1, k2] : resonance_pairs()) {
      auto g = [&](const FrequencyPair& w) { return k1 * w.omega1 + k2 * w.omega2; };
      if (g(a.w) == 0.0 || std::signbit(g(a.w)) == std::signbit(g(b.w))) continue;
      double lo = a.mu, hi = b.mu;
      const bool lo_sign = std::signbit(g(a.w));
      while (hi - lo > kBisectionTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (std::signbit(g(linear_frequencies(at(mid)))) == lo_sign) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double root = 0.5 * (lo + hi);
      s.crossings.push_back({k1, k2, root, linear_frequencies(at(root))});
    }
  }
  return s;
}

}  // namespace l4norm

#endif  // L4NORM_SCAN_HPP
