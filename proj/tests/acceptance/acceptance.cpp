// One PASS/FAIL line per acceptance criterion. Criterion 3 is a known failure
// of the printed formulas: it prints FAIL and does not fail the run, but an
// unexpected PASS does.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "l4norm/l4norm.hpp"

using namespace l4norm;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, std::string what) {
    if (!ok) {
      pass = false;
      notes.push_back(std::move(what));
    }
  }
};

ModelParams classical(double mu) { return ModelParams::perturbed(mu, 0.0, 0.0, 0.0); }

struct Linear {
  ModelParams p;
  TruncatedPoly L;
  QuadraticCoefficients q;
};

Linear linear_at(const ModelParams& p) {
  const auto root = solve_triangular_numeric(p, Branch::L4);
  auto L = taylor_lagrangian(p, OriginShift::from_point(root, p), 3);
  auto q = extract_EFG(L.slice(2), p);
  return {p, std::move(L), q};
}

constexpr double kRouthOracle = 0.038520896504551;

// Criterion 1: equilibrium reduces to the equilateral point; normalization
// rejects mass ratios past the linear-stability boundary.
Outcome classical_reduction() {
  Outcome o;
  for (double mu : {0.001, 0.01, 0.0385, 0.2, 0.4}) {
    const auto p = classical(mu);
    const auto e = solve_triangular_numeric(p, Branch::L4);
    const double d = std::hypot(e.x - (0.5 - mu), e.y - std::sqrt(3.0) / 2.0);
    o.require(d < 1e-12, fmt::format("mu {}: distance {:.3g}", mu, d));
    const auto l = linear_at(p);
    bool rejected = false;
    try {
      frequencies(p, l.q);
    } catch (const StabilityDomainError&) {
      rejected = true;
    }
    o.require(rejected == (mu > kRouthOracle), fmt::format("mu {}: frequency stage rejected = {}", mu, rejected));
  }
  return o;
}

// Criterion 2: frequency identities and the bracketed onset of instability.
Outcome frequency_identity() {
  Outcome o;
  for (int i = 0; i < 50; ++i) {
    const double mu = 1e-4 + (0.0385 - 1e-4) * i / 49.0;
    const auto l = linear_at(classical(mu));
    const auto w = frequencies(l.p, l.q);
    const double s = w.omega1 * w.omega1 + w.omega2 * w.omega2 - 1.0;
    const double pr = w.omega1 * w.omega1 * w.omega2 * w.omega2 - 6.75 * mu * (1.0 - mu);
    o.require(std::abs(s) < 1e-10 && std::abs(pr) < 1e-10, fmt::format("mu {}: sum {:.3g} product {:.3g}", mu, s, pr));
  }
  // discriminant root of 1 - 27 mu (1 - mu) by bisection
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-15) {
    const double m = 0.5 * (lo + hi);
    (1.0 - 27.0 * m * (1.0 - m) > 0.0 ? lo : hi) = m;
  }
  const double root = 0.5 * (lo + hi);
  o.require(std::abs(root - kRouthOracle) < 1e-12, fmt::format("discriminant root {}", root));
  auto stable = [](double mu) {
    return classify_linear_stability(linear_at(classical(mu)).q) == LinearStability::Stable;
  };
  o.require(stable(root - 1e-6) && !stable(root + 1e-6), "onset not bracketed within 1e-6 of the discriminant root");
  return o;
}

// Criterion 3: series-order gates on the printed equilibrium series, normal
// mode entries and second-order coefficients.
Outcome series_order() {
  Outcome o;
  std::set<std::string> bad;
  for (const auto& c : classify_formulas(0.01)) {
    const bool gated = c.id.starts_with("eq.series") || c.group == "j" || c.group == "b2";
    if (gated && !c.within_order()) bad.insert(fmt::format("{}[{}:{}]", c.id, to_string(c.perturbation),
                                                           to_string(c.category)));
  }
  int series_bad = 0;
  for (const auto& id : bad) series_bad += id.starts_with("eq.series");
  o.require(series_bad == 0, fmt::format("{} equilibrium series failures", series_bad));
  o.require(bad.empty(), fmt::format("{} formula/perturbation pairs outside [3.5, 4.5], e.g. {}", bad.size(),
                                     bad.empty() ? "" : *bad.begin()));
  return o;
}

// Criterion 4: the linear stage diagonalises exactly; the drag gauge keeps the
// defect at round-off, which satisfies the linear bound trivially.
Outcome linear_exactness() {
  Outcome o;
  for (double mu : {0.005, 0.01, 0.02}) {
    const auto l = linear_at(classical(mu));
    const auto nm = j_numeric(l.p, l.q, frequencies(l.p, l.q));
    o.require(h2_residual(nm) < 1e-10, fmt::format("mu {}: H2 residual {:.3g}", mu, h2_residual(nm)));
    o.require(symplectic_defect(nm.J) < 1e-10, fmt::format("mu {}: defect {:.3g}", mu, symplectic_defect(nm.J)));
  }
  const double base = [] {
    const auto l = linear_at(classical(0.01));
    return symplectic_defect(j_numeric(l.p, l.q, frequencies(l.p, l.q)).J);
  }();
  for (double w1 : {1e-6, 1e-5, 1e-4}) {
    const auto l = linear_at(ModelParams::perturbed(0.01, 0.0, 0.0, w1));
    const double d = symplectic_defect(j_numeric(l.p, l.q, frequencies(l.p, l.q)).J);
    o.require(d <= std::max(base, 1e-14) + w1, fmt::format("W1 {}: defect {:.3g} above linear bound", w1, d));
  }
  return o;
}

std::vector<ModelParams> admitted_grid() {
  std::vector<ModelParams> out;
  for (double mu : {0.005, 0.01, 0.02}) {
    out.push_back(classical(mu));
    out.push_back(ModelParams::perturbed(mu, 1e-3, 0.0, 0.0));
    out.push_back(ModelParams::perturbed(mu, 0.0, 1e-3, 0.0));
    out.push_back(ModelParams::perturbed(mu, 0.0, 0.0, 1e-4));
    out.push_back(ModelParams::perturbed(mu, 1e-3, 1e-3, 1e-4));
  }
  return out;
}

// Criterion 5: back-substituted oracle B2 solves the second-order equations.
Outcome back_substitution() {
  Outcome o;
  for (const auto& p : admitted_grid()) {
    const auto l = linear_at(p);
    const auto w = frequencies(p, l.q);
    if (!moser_check(w).pass) {
      o.require(false, fmt::format("mu {} is inside a resonance neighborhood", p.mu()));
      continue;
    }
    const auto nm = j_numeric(p, l.q, w);
    const auto sol = solve_second_order_oracle(l.q, w, forcing_x2y2(l.L, first_order_components(nm), w));
    o.require(sol.residual < 1e-9, fmt::format("mu {} eps {} A2 {} W1 {}: residual {:.3g}", p.mu(), p.epsilon(),
                                               p.A2(), p.W1(), sol.residual));
  }
  return o;
}

struct H3Run {
  H3NormalCoefficients with;
  H3NormalCoefficients without;
};

H3Run h3_at(const ModelParams& p) {
  const auto l = linear_at(p);
  const auto w = frequencies(p, l.q);
  const auto b1 = first_order_components(j_numeric(p, l.q, w));
  const auto sol = solve_second_order_oracle(l.q, w, forcing_x2y2(l.L, b1, w));
  return {h3_normal_coefficients(l.L, w, b1, sol.B2), h3_normal_coefficients(l.L, w, b1, SecondOrder{})};
}

// Criterion 6: the cubic normal-form coefficients vanish, and the check has
// power: dropping B2 leaves coefficients far above the bound.
Outcome h3_vanishing() {
  Outcome o;
  auto check = [&](const ModelParams& p, const std::string& label) {
    const auto r = h3_at(p);
    const double bound = 1e-8 * r.with.S;
    o.require(r.with.max_abs() < bound, fmt::format("{}: max |A| {:.3g}, bound {:.3g}", label, r.with.max_abs(), bound));
    o.require(r.without.max_abs() > 1e3 * bound,
              fmt::format("{}: ablation max |A| {:.3g} not above 1e3 x bound", label, r.without.max_abs()));
    return r.with.max_abs();
  };
  for (double mu : {0.005, 0.01, 0.02}) check(classical(mu), fmt::format("classical mu {}", mu));
  // The first-order-consistent bound C h holds for any C once the remainder is
  // below the classical bound at both h and h/2.
  for (auto k : kPerturbations) {
    for (double h : {1e-3, 5e-4}) {
      check(single_perturbation(0.01, k, h), fmt::format("{} = {}", to_string(k), h));
    }
  }
  return o;
}

// Bisection on the classical frequency ratio from the closed-form quartic roots.
double ratio_crossing(double target, double lo, double hi) {
  auto f = [&](double mu) {
    const double s = std::sqrt(1.0 - 27.0 * mu * (1.0 - mu));
    return std::sqrt((1.0 + s) / 2.0) / std::sqrt((1.0 - s) / 2.0) - target;
  };
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double m = 0.5 * (lo + hi);
    ((f(lo) > 0) == (f(m) > 0) ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

// Criterion 7: the scan locates both interior resonances and the Moser check
// rejects their neighborhoods.
Outcome resonance_scan_check() {
  Outcome o;
  const auto s = resonance_scan(classical, 0.001, 0.038, 400);
  const std::vector<std::tuple<int, double, double>> targets{{-2, 0.0242939, ratio_crossing(2.0, 0.02, 0.03)},
                                                             {-3, 0.0135160, ratio_crossing(3.0, 0.01, 0.02)}};
  for (const auto& [k2, published, oracle] : targets) {
    o.require(std::abs(oracle - published) < 1e-6, fmt::format("oracle {} far from {}", oracle, published));
    const auto it = std::find_if(s.crossings.begin(), s.crossings.end(),
                                 [&](const ResonanceCrossing& c) { return c.k1 == 1 && c.k2 == k2; });
    if (it == s.crossings.end()) {
      o.require(false, fmt::format("no crossing for omega1 = {} omega2", -k2));
      continue;
    }
    o.require(std::abs(it->mu - oracle) < 1e-6, fmt::format("crossing {} vs oracle {}", it->mu, oracle));
    for (double d : {-1e-7, 0.0, 1e-7}) {
      const auto l = linear_at(classical(it->mu + d));
      o.require(!moser_check(frequencies(l.p, l.q)).pass, fmt::format("moser accepts mu {}", it->mu + d));
    }
  }
  o.require(s.crossings.size() == 2, fmt::format("{} crossings found, expected 2", s.crossings.size()));
  return o;
}

// Every printed formula known to disagree with its oracle beyond the
// truncation remainder. A new disagreement, or a known one disappearing,
// fails the run.
const std::vector<std::string> kExpectedLedger{
    "b1.y.printed", "b2.r1", "b2.r10", "b2.r2", "b2.r3", "b2.r4", "b2.r5", "b2.r5.divisor", "b2.r6",
    "b2.r6.divisor", "b2.r7", "b2.r8", "b2.r9", "b2.s1", "b2.s10", "b2.s2", "b2.s3", "b2.s4", "b2.s5", "b2.s6",
    "b2.s7", "b2.s8", "b2.s9", "dalembert.inverse_display", "dalembert.operator_label", "eq.epsilon_form.x.W1",
    "eq.epsilon_form.y.W1", "eq.offset.a", "eq.offset.b.W1", "h3.T1.W1", "h3.T2", "h3.T3", "h3.T4.W1",
    "h3.T4.epsilon", "h3.T5.W1", "h3.T5.square", "j.J13.A2", "j.J13.W1", "j.J13.epsilon", "j.J14.A2", "j.J14.W1",
    "j.J14.epsilon", "j.J21.A2", "j.J21.W1", "j.J21.epsilon", "j.J22.A2", "j.J22.W1", "j.J22.epsilon", "j.J23.A2",
    "j.J23.W1", "j.J23.epsilon", "j.J24.A2", "j.J24.W1", "j.J24.epsilon", "j.J24.scales",
    "second_order.y_equation"};

// Criterion 8: ledger completeness.
Outcome ledger_completeness() {
  Outcome o;
  const auto ledger = build_erratum_ledger();
  const auto ids = ledger.ids();
  const std::set<std::string> have(ids.begin(), ids.end());
  for (const auto& id : kExpectedLedger) o.require(have.count(id), fmt::format("missing {}", id));
  const std::set<std::string> expected(kExpectedLedger.begin(), kExpectedLedger.end());
  for (const auto& id : ids) o.require(expected.count(id), fmt::format("unreviewed erratum {}", id));
  for (const auto& c : ledger.classifications) {
    if (c.within_order()) continue;
    const bool zeroth = c.category == OrderCategory::ZerothOrder;
    const auto id = zeroth ? c.id : fmt::format("{}.{}", c.id, to_string(c.perturbation));
    o.require(have.count(id) || have.count(c.id), fmt::format("{} absorbed silently", id));
  }
  for (const auto& e : ledger.numeric) o.require(!e.location.empty(), fmt::format("{} has no location", e.id));
  // test power: a synthetic first-order disagreement must surface
  OrderClassification probe;
  probe.id = "probe";
  probe.category = classify(0.0, 2e-3, 1e-3, 1.0);
  o.require(!errata_from({probe}).empty(), "synthetic first-order disagreement not flagged");
  return o;
}

struct Criterion {
  int number;
  std::string name;
  std::function<Outcome()> run;
  bool expected_failure = false;
  std::string reason;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "classical reduction", classical_reduction},
      {2, "frequency identity", frequency_identity},
      {3, "series-order gates", series_order, true,
       "printed normal-mode entries disagree at first order and printed second-order coefficients at zeroth order; "
       "see the erratum ledger"},
      {4, "linear-stage exactness", linear_exactness},
      {5, "second-order back-substitution", back_substitution},
      {6, "cubic normal form vanishes", h3_vanishing},
      {7, "resonance scan", resonance_scan_check},
      {8, "erratum ledger completeness", ledger_completeness},
  };
  bool ok = true;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.require(false, fmt::format("exception: {}", e.what()));
    }
    std::string line = fmt::format("criterion {} ({}): {}", c.number, c.name, out.pass ? "PASS" : "FAIL");
    if (!out.pass) line += " - " + out.notes.front();
    if (out.notes.size() > 1) line += fmt::format(" (+{} more)", out.notes.size() - 1);
    if (c.expected_failure) {
      line += out.pass ? " [expected failure passed unexpectedly]" : " [expected failure: " + c.reason + "]";
      ok = ok && !out.pass;
    } else {
      ok = ok && out.pass;
    }
    std::cout << line << std::endl;
  }
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
