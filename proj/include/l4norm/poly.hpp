#ifndef L4NORM_POLY_HPP
#define L4NORM_POLY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <vector>

#include <fmt/format.h>

#include "l4norm/errors.hpp"

namespace l4norm {

/// Slot order of the phase variables: displacements about the equilibrium,
/// then their velocities (or canonical momenta for Hamiltonian polynomials).
enum Var : int { kXi = 0, kEta = 1, kXiDot = 2, kEtaDot = 3 };

using Exponent = std::array<int, 4>;

constexpr int total_degree(const Exponent& e) noexcept { return e[0] + e[1] + e[2] + e[3]; }
constexpr int velocity_degree(const Exponent& e) noexcept { return e[2] + e[3]; }

enum class DumpFormat { Decimal, HexFloat };

/// Polynomial in (xi, eta, xidot, etadot) truncated at a fixed total degree.
/// Products truncate to the smaller cap of the operands.
template <class Real = double>
class BasicTruncatedPoly {
 public:
  using Terms = std::map<Exponent, Real>;

  explicit BasicTruncatedPoly(int cap = 3) : cap_(cap) {
    if (cap < 0) throw ContractError(fmt::format("degree cap {} is negative", cap));
  }

  static BasicTruncatedPoly constant(const Real& c, int cap) {
    BasicTruncatedPoly p(cap);
    p.add_term({0, 0, 0, 0}, c);
    return p;
  }

  static BasicTruncatedPoly variable(int slot, int cap) {
    BasicTruncatedPoly p(cap);
    Exponent e{0, 0, 0, 0};
    e.at(static_cast<std::size_t>(slot)) = 1;
    p.add_term(e, Real(1));
    return p;
  }

  int degree_cap() const noexcept { return cap_; }
  const Terms& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  Real coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Real(0) : it->second;
  }

  /// Adds c to the coefficient of e; terms above the cap are dropped.
  void add_term(const Exponent& e, const Real& c) {
    for (int k : e) {
      if (k < 0) throw ContractError("negative exponent");
    }
    if (total_degree(e) > cap_ || c == Real(0)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Real(0)) terms_.erase(it);
    }
  }

  BasicTruncatedPoly& operator+=(const BasicTruncatedPoly& o) {
    cap_ = std::min(cap_, o.cap_);
    drop_above_cap();
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  BasicTruncatedPoly& operator-=(const BasicTruncatedPoly& o) { return *this += -o; }
  BasicTruncatedPoly& operator*=(const Real& s) {
    if (s == Real(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& kv : terms_) kv.second *= s;
    return *this;
  }

  friend BasicTruncatedPoly operator+(BasicTruncatedPoly a, const BasicTruncatedPoly& b) { return a += b; }
  friend BasicTruncatedPoly operator-(BasicTruncatedPoly a, const BasicTruncatedPoly& b) { return a -= b; }
  friend BasicTruncatedPoly operator*(BasicTruncatedPoly a, const Real& s) { return a *= s; }
  friend BasicTruncatedPoly operator*(const Real& s, BasicTruncatedPoly a) { return a *= s; }
  BasicTruncatedPoly operator-() const {
    BasicTruncatedPoly r(*this);
    for (auto& kv : r.terms_) kv.second = -kv.second;
    return r;
  }

  friend BasicTruncatedPoly operator*(const BasicTruncatedPoly& a, const BasicTruncatedPoly& b) {
    BasicTruncatedPoly r(std::min(a.cap_, b.cap_));
    for (const auto& [ea, ca] : a.terms_) {
      const int da = total_degree(ea);
      for (const auto& [eb, cb] : b.terms_) {
        if (da + total_degree(eb) > r.cap_) continue;
        r.add_term({ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]}, ca * cb);
      }
    }
    return r;
  }

  /// Homogeneous part of degree d (cap unchanged).
  BasicTruncatedPoly slice(int d) const {
    BasicTruncatedPoly r(cap_);
    for (const auto& [e, c] : terms_) {
      if (total_degree(e) == d) r.terms_.emplace(e, c);
    }
    return r;
  }

  BasicTruncatedPoly truncate(int cap) const {
    BasicTruncatedPoly r(std::min(cap, cap_));
    for (const auto& [e, c] : terms_) r.add_term(e, c);
    return r;
  }

  /// Part whose velocity degree equals k.
  BasicTruncatedPoly velocity_slice(int k) const {
    BasicTruncatedPoly r(cap_);
    for (const auto& [e, c] : terms_) {
      if (velocity_degree(e) == k) r.terms_.emplace(e, c);
    }
    return r;
  }

  BasicTruncatedPoly derivative(int slot) const {
    const auto s = static_cast<std::size_t>(slot);
    BasicTruncatedPoly r(cap_);
    for (const auto& [e, c] : terms_) {
      if (e.at(s) == 0) continue;
      Exponent d = e;
      d[s] -= 1;
      r.add_term(d, c * Real(e[s]));
    }
    return r;
  }

  Real evaluate(const std::array<Real, 4>& z) const {
    Real acc(0);
    for (const auto& [e, c] : terms_) {
      Real m = c;
      for (std::size_t i = 0; i < 4; ++i) {
        for (int k = 0; k < e[i]; ++k) m *= z[i];
      }
      acc += m;
    }
    return acc;
  }

  Real max_abs() const {
    using std::abs;
    Real m(0);
    for (const auto& kv : terms_) m = std::max<Real>(m, abs(kv.second));
    return m;
  }

  int max_degree() const {
    int d = -1;
    for (const auto& kv : terms_) d = std::max(d, total_degree(kv.first));
    return d;
  }

  /// Every stored exponent respects the cap.
  bool respects_cap() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [&](const auto& kv) { return total_degree(kv.first) <= cap_; });
  }

  /// Drops coefficients with |c| <= tol.
  BasicTruncatedPoly pruned(const Real& tol) const {
    using std::abs;
    BasicTruncatedPoly r(cap_);
    for (const auto& [e, c] : terms_) {
      if (abs(c) > tol) r.terms_.emplace(e, c);
    }
    return r;
  }

  /// One line per term: "e0 e1 e2 e3 coefficient", sorted by exponent.
  void dump(std::ostream& os, DumpFormat style = DumpFormat::Decimal) const {
    for (const auto& [e, c] : terms_) {
      const double v = static_cast<double>(c);
      if (style == DumpFormat::HexFloat) {
        os << fmt::format("{} {} {} {} {:a}\n", e[0], e[1], e[2], e[3], v);
      } else {
        os << fmt::format("{} {} {} {} {:.17g}\n", e[0], e[1], e[2], e[3], v);
      }
    }
  }

 private:
  void drop_above_cap() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      it = total_degree(it->first) > cap_ ? terms_.erase(it) : std::next(it);
    }
  }

  int cap_;
  Terms terms_;
};

using TruncatedPoly = BasicTruncatedPoly<double>;

/// max |a - b| over the union of supports.
template <class Real>
Real max_abs_difference(const BasicTruncatedPoly<Real>& a, const BasicTruncatedPoly<Real>& b) {
  BasicTruncatedPoly<Real> d(std::max(a.degree_cap(), b.degree_cap()));
  for (const auto& [e, c] : a.terms()) d.add_term(e, c);
  for (const auto& [e, c] : b.terms()) d.add_term(e, -c);
  return d.max_abs();
}

/// (1 + s)^alpha to the cap of s; s must have no constant term.
template <class Real>
BasicTruncatedPoly<Real> binomial_series(const BasicTruncatedPoly<Real>& s, const Real& alpha) {
  if (s.coeff({0, 0, 0, 0}) != Real(0)) {
    throw ContractError("binomial series argument has a constant term");
  }
  const int cap = s.degree_cap();
  auto result = BasicTruncatedPoly<Real>::constant(Real(1), cap);
  auto power = BasicTruncatedPoly<Real>::constant(Real(1), cap);
  Real binom(1);
  for (int k = 1; k <= cap; ++k) {
    power = power * s;
    binom *= (alpha - Real(k - 1)) / Real(k);
    result += power * binom;
  }
  return result;
}

/// Substitutes args[i] for slot i and sums c * prod args^e. T needs +, * and
/// scalar multiplication; `one` is the multiplicative identity of T.
template <class T, class Real>
T compose(const BasicTruncatedPoly<Real>& p, const std::array<T, 4>& args, const T& one) {
  std::array<std::vector<T>, 4> powers;
  for (std::size_t i = 0; i < 4; ++i) powers[i].push_back(one);
  auto power = [&](std::size_t i, int k) -> const T& {
    auto& v = powers[i];
    while (static_cast<int>(v.size()) <= k) v.push_back(v.back() * args[i]);
    return v[static_cast<std::size_t>(k)];
  };
  T acc = one * Real(0);
  for (const auto& [e, c] : p.terms()) {
    T m = power(0, e[0]);
    for (std::size_t i = 1; i < 4; ++i) {
      if (e[i] > 0) m = m * power(i, e[i]);
    }
    acc = acc + m * c;
  }
  return acc;
}

/// Energy function of a Lagrangian polynomial: each monomial of velocity
/// degree k contributes (k - 1) times itself.
template <class Real>
BasicTruncatedPoly<Real> energy_polynomial(const BasicTruncatedPoly<Real>& lagrangian) {
  BasicTruncatedPoly<Real> h(lagrangian.degree_cap());
  for (const auto& [e, c] : lagrangian.terms()) h.add_term(e, c * Real(velocity_degree(e) - 1));
  return h;
}

}  // namespace l4norm

#endif  // L4NORM_POLY_HPP
