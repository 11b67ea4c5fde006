#ifndef L4NORM_DALEMBERT_HPP
#define L4NORM_DALEMBERT_HPP

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "l4norm/errors.hpp"

namespace l4norm {

/// Term I1^(j/2) I2^(m/2) [C cos(p phi1 + q phi2) + S sin(p phi1 + q phi2)].
/// Ordered by (degree, p, q, j) for printing.
struct HarmonicKey {
  int j = 0;
  int m = 0;
  int p = 0;
  int q = 0;

  constexpr int degree() const noexcept { return j + m; }

  friend constexpr auto operator<=>(const HarmonicKey& a, const HarmonicKey& b) noexcept {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    if (auto c = a.p <=> b.p; c != 0) return c;
    if (auto c = a.q <=> b.q; c != 0) return c;
    return a.j <=> b.j;
  }
  friend constexpr bool operator==(const HarmonicKey&, const HarmonicKey&) = default;
};

/// Parity rules: 0 <= p <= j, p = j mod 2; -m <= q <= m, q = m mod 2.
constexpr bool parity_valid(const HarmonicKey& k) noexcept {
  return k.j >= 0 && k.m >= 0 && k.p >= 0 && k.p <= k.j && (k.j - k.p) % 2 == 0 &&
         k.q >= -k.m && k.q <= k.m && (k.m - k.q) % 2 == 0;
}

struct TrigCoeff {
  double C = 0.0;
  double S = 0.0;
};

/// Basic frequencies with omega1 > omega2 > 0. The aggregate form is left
/// unchecked so synthetic pairs can be built; checked() enforces the ordering.
struct FrequencyPair {
  double omega1 = 0.0;
  double omega2 = 0.0;

  static FrequencyPair checked(double w1, double w2) {
    if (!std::isfinite(w1) || !std::isfinite(w2) || !(w2 > 0.0) || !(w1 > w2)) {
      throw ContractError(fmt::format("frequencies ({}, {}) violate 0 < omega2 < omega1", w1, w2));
    }
    return {w1, w2};
  }

  /// Rate of the harmonic (p, q): phi1 advances at omega1, phi2 at -omega2.
  double rate(int p, int q) const noexcept { return p * omega1 - q * omega2; }
};

/// Frequency corrections f_2n = sum f'_{2(n-m),2m} I1^(n-m) I2^m (and g alike).
/// Structural only: the second-order stage never populates them.
struct FrequencyCorrection {
  std::map<std::pair<int, int>, double> f_prime;
  std::map<std::pair<int, int>, double> g_prime;
};

class DAlembertSeries {
 public:
  using Terms = std::map<HarmonicKey, TrigCoeff>;

  DAlembertSeries() = default;

  /// Adds a term, first mapping (p, q) to canonical form (p > 0, or p = 0 and
  /// q >= 0; negating both flips the sine sign). Throws on a parity violation.
  void add(int j, int m, int p, int q, double C, double S) {
    if (p < 0 || (p == 0 && q < 0)) {
      p = -p;
      q = -q;
      S = -S;
    }
    if (p == 0 && q == 0) S = 0.0;
    const HarmonicKey k{j, m, p, q};
    if (!parity_valid(k)) {
      throw ContractError(fmt::format("term (j={}, m={}, p={}, q={}) violates the parity rules", j, m, p, q));
    }
    if (C == 0.0 && S == 0.0) return;
    auto& c = terms_[k];
    c.C += C;
    c.S += S;
    if (c.C == 0.0 && c.S == 0.0) terms_.erase(k);
  }

  const Terms& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  TrigCoeff coeff(const HarmonicKey& k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? TrigCoeff{} : it->second;
  }

  DAlembertSeries& operator+=(const DAlembertSeries& o) {
    for (const auto& [k, c] : o.terms_) add(k.j, k.m, k.p, k.q, c.C, c.S);
    return *this;
  }
  DAlembertSeries& operator-=(const DAlembertSeries& o) {
    for (const auto& [k, c] : o.terms_) add(k.j, k.m, k.p, k.q, -c.C, -c.S);
    return *this;
  }
  DAlembertSeries& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& kv : terms_) {
      kv.second.C *= s;
      kv.second.S *= s;
    }
    return *this;
  }
  friend DAlembertSeries operator+(DAlembertSeries a, const DAlembertSeries& b) { return a += b; }
  friend DAlembertSeries operator-(DAlembertSeries a, const DAlembertSeries& b) { return a -= b; }
  friend DAlembertSeries operator*(DAlembertSeries a, double s) { return a *= s; }
  friend DAlembertSeries operator*(double s, DAlembertSeries a) { return a *= s; }
  DAlembertSeries operator-() const { return *this * -1.0; }

  /// Product-to-sum expansion; degrees add.
  friend DAlembertSeries operator*(const DAlembertSeries& a, const DAlembertSeries& b) {
    DAlembertSeries r;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        const int j = ka.j + kb.j;
        const int m = ka.m + kb.m;
        r.add(j, m, ka.p + kb.p, ka.q + kb.q, 0.5 * (ca.C * cb.C - ca.S * cb.S),
              0.5 * (ca.C * cb.S + ca.S * cb.C));
        r.add(j, m, ka.p - kb.p, ka.q - kb.q, 0.5 * (ca.C * cb.C + ca.S * cb.S),
              0.5 * (ca.S * cb.C - ca.C * cb.S));
      }
    }
    return r;
  }

  /// Terms of total degree j + m = d.
  DAlembertSeries degree_part(int d) const {
    DAlembertSeries r;
    for (const auto& [k, c] : terms_) {
      if (k.degree() == d) r.terms_.emplace(k, c);
    }
    return r;
  }

  /// Terms with the given action powers.
  DAlembertSeries block(int j, int m) const {
    DAlembertSeries r;
    for (const auto& [k, c] : terms_) {
      if (k.j == j && k.m == m) r.terms_.emplace(k, c);
    }
    return r;
  }

  /// Drops terms whose coefficients are both <= tol in magnitude.
  DAlembertSeries pruned(double tol) const {
    DAlembertSeries r;
    for (const auto& [k, c] : terms_) {
      if (std::abs(c.C) > tol || std::abs(c.S) > tol) r.terms_.emplace(k, c);
    }
    return r;
  }

  /// Re-inserts every term through add(); idempotent on canonical input.
  DAlembertSeries normalized() const {
    DAlembertSeries r;
    for (const auto& [k, c] : terms_) r.add(k.j, k.m, k.p, k.q, c.C, c.S);
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& kv : terms_) m = std::max({m, std::abs(kv.second.C), std::abs(kv.second.S)});
    return m;
  }

  bool parity_ok() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& kv) { return parity_valid(kv.first); });
  }

  friend bool operator==(const DAlembertSeries& a, const DAlembertSeries& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (const auto& [k, c] : a.terms_) {
      const auto o = b.coeff(k);
      if (o.C != c.C || o.S != c.S) return false;
    }
    return true;
  }

  /// One line per term: "j m p q C S", 17 significant digits.
  void print(std::ostream& os) const {
    for (const auto& [k, c] : terms_) {
      os << fmt::format("{} {} {} {} {:.17g} {:.17g}\n", k.j, k.m, k.p, k.q, c.C, c.S);
    }
  }

 private:
  Terms terms_;
};

/// max |a - b| over coefficients.
inline double max_abs_difference(const DAlembertSeries& a, const DAlembertSeries& b) {
  return (a - b).max_abs();
}

/// D = omega1 d/dphi1 - omega2 d/dphi2.
inline DAlembertSeries apply_D(const DAlembertSeries& s, const FrequencyPair& w) {
  DAlembertSeries r;
  for (const auto& [k, c] : s.terms()) {
    const double f = w.rate(k.p, k.q);
    r.add(k.j, k.m, k.p, k.q, c.S * f, -c.C * f);
  }
  return r;
}

/// Delta_{p,q} = [omega1^2 - f^2][omega2^2 - f^2], f = p omega1 - q omega2.
inline double small_divisor(int p, int q, const FrequencyPair& w) {
  const double f = w.rate(p, q);
  return (w.omega1 * w.omega1 - f * f) * (w.omega2 * w.omega2 - f * f);
}

/// (D^2 + omega1^2)(D^2 + omega2^2) applied harmonic by harmonic.
inline DAlembertSeries apply_delta_product(const DAlembertSeries& s, const FrequencyPair& w) {
  DAlembertSeries r;
  for (const auto& [k, c] : s.terms()) {
    const double d = small_divisor(k.p, k.q, w);
    r.add(k.j, k.m, k.p, k.q, c.C * d, c.S * d);
  }
  return r;
}

inline constexpr double kDivisorFloor = 1e-8;
inline constexpr double kCriticalTolerance = 1e-12;

constexpr bool is_critical(int p, int q) noexcept {
  return (p == 1 && q == 0) || (p == 0 && q == 1);
}

/// Solves (D^2 + omega1^2)(D^2 + omega2^2) X = s by division per harmonic.
inline DAlembertSeries invert_delta(const DAlembertSeries& s, const FrequencyPair& w,
                                    double floor = kDivisorFloor,
                                    double critical_tol = kCriticalTolerance) {
  DAlembertSeries r;
  for (const auto& [k, c] : s.terms()) {
    if (is_critical(k.p, k.q)) {
      if (std::abs(c.C) > critical_tol || std::abs(c.S) > critical_tol) {
        throw CriticalTermError(fmt::format(
            "critical harmonic {} (p={}, q={}) at action powers (j={}, m={}) has coefficient "
            "(C={:.3e}, S={:.3e})",
            k.p == 1 ? "phi1" : "phi2", k.p, k.q, k.j, k.m, c.C, c.S));
      }
      continue;
    }
    const double d = small_divisor(k.p, k.q, w);
    if (std::abs(d) < floor) {
      throw SmallDivisorError(fmt::format(
          "divisor Delta_({},{}) = {:.3e} is below the floor {:.1e} (near resonance)", k.p, k.q, d, floor));
    }
    r.add(k.j, k.m, k.p, k.q, c.C / d, c.S / d);
  }
  return r;
}

struct MoserReport {
  double min_combination = 0.0;
  int k1 = 0;
  int k2 = 0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr int kMoserOrder = 4;
inline constexpr double kMoserTolerance = 1e-4;

/// min |k1 omega1 + k2 omega2| over 1 <= |k1| + |k2| <= 4, one sign per pair.
inline MoserReport moser_check(const FrequencyPair& w, double tol = kMoserTolerance) {
  MoserReport rep;
  rep.tolerance = tol;
  rep.min_combination = INFINITY;
  for (int order = 1; order <= kMoserOrder; ++order) {
    for (int k1 = order; k1 >= 0; --k1) {
      for (int k2 : {k1 - order, order - k1}) {
        if (k1 == 0 && k2 < 0) continue;
        const double v = std::abs(k1 * w.omega1 + k2 * w.omega2);
        if (v < rep.min_combination) {
          rep.min_combination = v;
          rep.k1 = k1;
          rep.k2 = k2;
        }
      }
    }
  }
  rep.pass = rep.min_combination > tol;
  return rep;
}

}  // namespace l4norm

#endif  // L4NORM_DALEMBERT_HPP
