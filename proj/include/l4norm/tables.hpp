#ifndef L4NORM_TABLES_HPP
#define L4NORM_TABLES_HPP

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "l4norm/dalembert.hpp"
#include "l4norm/errors.hpp"
#include "l4norm/h3_closed.hpp"
#include "l4norm/model.hpp"
#include "l4norm/normal_modes.hpp"

namespace l4norm {

/// One family of printed coefficients: plain, primed and double-primed, index 1..4
/// stored at 0..3.
struct CoefficientFamily {
  std::array<double, 4> plain{};
  std::array<double, 4> prime{};
  std::array<double, 4> dprime{};
};

struct FGTable {
  CoefficientFamily F;
  CoefficientFamily G;
};

/// All 24 printed entries, term by term. Entries printed with a doubled A2
/// factor (e.g. "17801 A2/9 A2 epsilon") are evaluated with both factors.
inline FGTable fg_tables(const ModelParams& p) {
  const auto [g, e, A, w, s3] = detail::series_vars(p);
  const double we = w * e;
  FGTable t;
  auto& F = t.F;
  auto& G = t.G;

  F.plain[0] = -w * e / 6.0;
  F.plain[1] = 3.0 / 32.0 *
               (16.0 * e / 3.0 + 6.0 * A - 979.0 / 18.0 * A * e + (143.0 + 9.0 * g) / (6.0 * s3) * w +
                (555.0 + 376.0 * g) / (27.0 * s3) * we +
                g * (14.0 + 4.0 * e / 3.0 + 25.0 * A - 1507.0 / 18.0 * A * e -
                     (215.0 + 29.0 * g) / (6.0 * s3) * w - 2.0 * (1174.0 + 169.0 * g) / (27.0 * s3) * we));
  F.plain[2] = 3.0 * s3 / 16.0 *
               (14.0 - 16.0 * e / 3.0 + 23.0 * A / 2.0 - 104.0 / 9.0 * A * e +
                115.0 * (1.0 + g) / (18.0 * s3) * w - 2.0 * (439.0 - 68.0 * g) / (27.0 * s3) * we +
                g * (32.0 * e / 3.0 + 40.0 * A - 310.0 / 9.0 * A * e + (511.0 + 53.0 * g) / (6.0 * s3) * w -
                     (2519.0 - 249.0 * g) / (27.0 * s3) * we));
  F.plain[3] = -3.0 / 256.0 *
               (364.0 + 420.0 * A - 17801.0 * A / 9.0 * A * e + (2821.0 + 189.0 * g) / (3.0 * s3) * w -
                (23077.0 + 9592.0 * g) / (27.0 * s3) * we +
                28.0 * g *
                    (23.0 + 100.0 * e / 21.0 + 849.0 * A / 14.0 + 59.0 / 7.0 * A * e -
                     (125.0 + 38.0 * g) / (6.0 * s3) * w - (87613.0 - 213.0 * g) / (27.0 * s3) * we));

  F.prime[0] = w * e / (3.0 * s3);
  F.prime[1] = 3.0 * s3 / 16.0 *
               (14.0 - 16.0 * e / 3.0 + A - 1367.0 / 18.0 * A * e + 115.0 * (1.0 + g) / (18.0 * s3) * w -
                (863.0 - 136.0 * g) / (27.0 * s3) * we +
                g * (32.0 * e / 3.0 + 40.0 * A - 382.0 / 9.0 * A * e + (511.0 + 53.0 * g) / (6.0 * s3) * w -
                     (2519.0 - 24.0 * g) / (27.0 * s3) * we));
  F.prime[2] = -9.0 / 8.0 *
               (8.0 * e / 3.0 + 203.0 * A / 6.0 - 721.0 / 54.0 * A * e -
                (105.0 + 15.0 * g) / (18.0 * s3) * w - (319.0 - 114.0 * g) / (81.0 * s3) * we +
                g * (2.0 - 4.0 * e / 9.0 - 173.0 * A / 6.0 - 781.0 / 9.0 * A * e +
                     (197.0 + 23.0 * g) / (18.0 * s3) * w - (265.0 - 32.0 * g) / (81.0 * s3) * we));
  F.prime[3] = -3.0 * s3 / 16.0 *
               (392.0 - 532.0 * e / 3.0 + 1918.0 * A / 3.0 - 28582.0 * A / 9.0 * A * e +
                (203.0 + 1211.0 * g) / (9.0 * s3) * w + (949.0 + 4378.0 * g) / (27.0 * s3) * we +
                28.0 * g *
                    (108.0 * e / 7.0 + 4037.0 * A / 84.0 - 611.0 / 21.0 * A * e +
                     (8397.0 + 919.0 * g) / (84.0 * s3) * w - (92266.0 - 1869.0 * g) / (27.0 * s3) * we));

  F.dprime[0] = w * e / 6.0;
  F.dprime[1] = -9.0 / 32.0 *
                (8.0 * e / 3.0 + 203.0 * A / 6.0 - 625.0 / 54.0 * A * e -
                 (105.0 + 15.0 * g) / (18.0 * s3) * w - (307.0 - 114.0 * g) / (81.0 * s3) * we +
                 g * (2.0 - 4.0 * e / 9.0 + 55.0 * A / 2.0 - 797.0 / 54.0 * A * e +
                      (197.0 + 23.0 * g) / (18.0 * s3) * w - (211.0 - 32.0 * g) / (81.0 * s3) * we));
  F.dprime[2] = -9.0 * s3 / 16.0 *
                (2.0 - 8.0 * e / 3.0 + 55.0 * A / 6.0 - 134.0 / 3.0 * A * e - (37.0 + g) / (18.0 * s3) * w -
                 (93.0 + 226.0 * g) / (81.0 * s3) * we +
                 g * (4.0 * e + 169.0 / 27.0 * A * e + (241.0 + 45.0 * g) / (18.0 * s3) * w -
                      (1558.0 - 126.0 * g) / (81.0 * s3) * we));
  F.dprime[3] = 9.0 / 256.0 *
                (212.0 * e / 3.0 + 2950.0 * A / 3.0 - 1370.0 * A / 27.0 * A * e -
                 (771.0 + 237.0 * g) / (9.0 * s3) * w - 2.0 * (1907.0 - 984.0 * g) / (81.0 * s3) * we +
                 28.0 * g *
                     (11.0 / 7.0 + 4.0 * e / 9.0 - 152.0 * A / 7.0 - 36965.0 / 504.0 * A * e +
                      (2569.0 + 277.0 * g) / (252.0 * s3) * w + (22603.0 + 4396.0 * g) / (1134.0 * s3) * we));

  G.plain[0] = -w * e / 6.0;
  G.plain[1] = 3.0 / 32.0 *
               (14.0 - 16.0 * e / 3.0 + A - 1367.0 / 18.0 * A * e + 115.0 * (1.0 + g) / (18.0 * s3) * w -
                (863.0 - 136.0 * g) / (27.0 * s3) * we +
                g * (32.0 * e / 3.0 + 40.0 * A - 382.0 / 9.0 * A * e + (511.0 + 53.0 * g) / (6.0 * s3) * w -
                     (2519.0 - 24.0 * g) / (27.0 * s3) * we));
  G.plain[2] = 3.0 * s3 / 16.0 *
               (16.0 * e / 3.0 + 6.0 * A - 907.0 * A / 18.0 * A * e + (143.0 + 9.0 * g) / (6.0 * s3) * w +
                (477.0 + 403.0 * g) / (27.0 * s3) * we +
                g * (14.0 + 4.0 * e / 3.0 + 71.0 * A / 2.0 - 1489.0 / 18.0 * A * e -
                     (215.0 + 29.0 * g) / (6.0 * s3) * w - 2.0 * (1174.0 + 169.0 * g) / (27.0 * s3) * we));
  G.plain[3] = 3.0 * s3 / 256.0 *
               (84.0 + 52.0 * e + 212.0 * A - 267.0 * A * e + 2.0 * (299.0 + 61.0 * g) / (3.0 * s3) * w -
                (14854.0 + 225.0 * g) / (27.0 * s3) * we +
                g * (32.0 * e + 156.0 * A + 649.0 * A * e - (562.0 + 8.0 * g) / (3.0 * s3) * w +
                     (13285.0 + 5169.0 * g) / (27.0 * s3) * we));

  G.prime[0] = -w * e / s3;
  G.prime[1] = 9.0 / 16.0 *
               (8.0 * e / 3.0 + 203.0 * A / 6.0 - 625.0 / 54.0 * A * e -
                (105.0 + 15.0 * g) / (18.0 * s3) * w - (307.0 - 114.0 * g) / (81.0 * s3) * we -
                g * (2.0 - 4.0 * e / 9.0 - 55.0 * A / 2.0 - 797.0 / 54.0 * A * e +
                     (197.0 + 23.0 * g) / (18.0 * s3) * w - (211.0 - 32.0 * g) / (81.0 * s3) * we));
  G.prime[2] = 3.0 * s3 / 8.0 *
               (14.0 - 16.0 * e / 3.0 + 65.0 * A / 6.0 - 1439.0 / 18.0 * A * e +
                115.0 * (1.0 + g) / (18.0 * s3) * w - (941.0 - 118.0 * g) / (27.0 * s3) * we +
                g * (32.0 * e / 3.0 - 40.0 * A - 310.0 / 9.0 * A * e + (511.0 + 53.0 * g) / (6.0 * s3) * w -
                     (251.0 - 24.0 * g) / (27.0 * s3) * we));
  G.prime[3] = -9.0 / 128.0 *
               (12.0 * e - 287.0 * A + 847.0 * A / 9.0 * A * e - 2.0 * (28.0 + g) / s3 * w -
                4.0 * (2210.0 - 69.0 * g) / (27.0 * s3) * we -
                g * (96.0 + 152.0 * e / 3.0 + 135.0 * A - 2320.0 / 9.0 * A * e +
                     (497.0 - 123.0 * g) / (3.0 * s3) * w - 4.0 * (17697.0 + 32.0 * g) / (27.0 * s3) * we));

  G.dprime[0] = -w * e / 6.0;
  G.dprime[1] = 9.0 * s3 / 32.0 *
                (2.0 - 8.0 * e / 3.0 + 23.0 * A / 3.0 - 44.0 * A * e - (37.0 + g) / (18.0 * s3) * w -
                 (123.0 + 349.0 * g) / (3.0 * s3) * we +
                 g * (4.0 * e + 88.0 * A / 27.0 + (421.0 + 45.0 * g) / (18.0 * s3) * w -
                      (1558.0 - 126.0 * g) / (81.0 * s3) * we));
  G.dprime[2] = -9.0 / 16.0 *
                (8.0 * e / 9.0 + 203.0 * A / 6.0 - 589.0 / 54.0 * A * e -
                 5.0 * (51.0 + 2.0 * g) / (18.0 * s3) * w - (349.0 - 282.0 * g) / (81.0 * s3) * we +
                 g * (2.0 - 4.0 * e / 9.0 - 26.0 * A - 412.0 / 27.0 * A * e +
                      (197.0 + 23.0 * g) / (18.0 * s3) * w - (211.0 - 32.0 * g) / (81.0 * s3) * we));
  G.dprime[3] = -9.0 * s3 / 256.0 *
                (12.0 + 20.0 * e / 3.0 + 76.0 * A - 350.0 * A / 3.0 * A * e + 32.0 * g / (3.0 * s3) * w -
                 2.0 * (1529.0 + 450.0 * g) / (27.0 * s3) * we +
                 g * (8.0 * e - 749.0 * A / 3.0 + 808.0 / 9.0 * A * e - (109.0 - 40.0 * g) / (3.0 * s3) * w +
                      (35.0 - 1269.0 * g) / (27.0 * s3) * we));
  return t;
}

struct RSTable {
  std::array<double, 10> r{};
  std::array<double, 10> s{};
};

namespace detail {

struct DivisorFactor {
  const char* name;
  double value;
};

inline void check_factors(std::initializer_list<DivisorFactor> factors, const char* coefficient,
                          double floor) {
  for (const auto& f : factors) {
    if (!(std::abs(f.value) >= floor)) {
      throw SmallDivisorError(fmt::format("{}: divisor factor {} = {:.3e} is below the floor {:.1e}",
                                          coefficient, f.name, f.value, floor));
    }
  }
}

// r1..r10 from one coefficient family, as printed.
inline std::array<double, 10> r_formulas(const JEntries& J, const FrequencyPair& wp,
                                         const CoefficientFamily& c, double floor) {
  const double w1 = wp.omega1, w2 = wp.omega2;
  const double J13 = J.J13, J14 = J.J14, J21 = J.J21, J22 = J.J22, J23 = J.J23, J24 = J.J24;
  auto F = [&](int i) { return c.plain[static_cast<std::size_t>(i - 1)]; };
  auto Fp = [&](int i) { return c.prime[static_cast<std::size_t>(i - 1)]; };
  auto Fpp = [&](int i) { return c.dprime[static_cast<std::size_t>(i - 1)]; };
  const double rt = std::sqrt(w1 / w2), rti = std::sqrt(w2 / w1), sq = std::sqrt(w1 * w2);
  const double U = J13 * J22 * rt - J14 * J21 * rti;
  const double Vm = J21 * J24 * rti - J22 * J23 * rt;
  const double Vp = J21 * J24 * rti + J22 * J23 * rt;
  const double Xp = J21 * J22 / sq + J23 * J24 * sq;
  const double Xm = J21 * J22 / sq - J23 * J24 * sq;
  auto cross = [&](int i) { return J13 * J14 * F(i) + (J13 * J24 + J14 * J23) * Fp(i); };
  auto cross2 = [&](int i) { return 2.0 * J13 * J14 * F(i) + (J13 * J24 + J14 * J23) * Fp(i); };
  const double D1 = J21 * J21 / w1 - J23 * J23 * w1;
  const double D2 = J22 * J22 / w2 - J24 * J24 * w2;
  const double sp = w1 + w2, sm = w1 - w2;

  std::array<double, 10> r{};
  check_factors({{"omega1^2 omega2^2", w1 * w1 * w2 * w2}}, "r1", floor);
  r[0] = (J13 * J13 * w1 * F(4) + J13 * J23 * w1 * Fp(4) + (J21 * J21 / w1 + J23 * J23 * w1) * Fpp(4)) /
         (w1 * w1 * w2 * w2);
  check_factors({{"omega1^2 omega2^2", w1 * w1 * w2 * w2}}, "r2", floor);
  r[1] = (J14 * J14 * w2 * F(4) + J14 * J24 * w2 * Fp(4) + (J22 * J22 / w2 + J24 * J24 * w2) * Fpp(4)) /
         (w1 * w1 * w2 * w2);

  check_factors({{"omega1^2", w1 * w1}, {"4*omega1^2 - omega2^2", 4.0 * w1 * w1 - w2 * w2}}, "r3", floor);
  r[2] = -1.0 / (3.0 * w1 * w1 * (4.0 * w1 * w1 - w2 * w2)) *
         (8.0 * w1 * w1 * w1 * J21 * (J13 * Fp(1) + 2.0 * J23 * Fpp(1)) +
          4.0 * w1 * w1 * ((J13 * F(2) + J23 * Fpp(2)) * J13 * w1 - D1 * Fpp(1)) -
          2.0 * w1 * J21 * (J13 * Fp(3) + 2.0 * J23 * Fpp(3)) - w1 * J13 * (J13 * F(4) + J23 * Fpp(4)) * w1 +
          D1 * Fpp(1));
  check_factors({{"omega2^2", w2 * w2}, {"4*omega2^2 - omega1^2", 4.0 * w2 * w2 - w1 * w1}}, "r4", floor);
  r[3] = 1.0 / (3.0 * w2 * w2 * (4.0 * w2 * w2 - w1 * w1)) *
         (8.0 * w2 * w2 * w2 * J22 * (J14 * Fp(1) + 2.0 * J24 * Fpp(1)) -
          4.0 * w2 * w2 * ((J14 * F(2) + J24 * Fpp(2)) * J14 * w2 - D2 * Fpp(2)) -
          2.0 * w2 * J22 * (J14 * Fp(3) + 2.0 * J24 * Fpp(3)) - w2 * J14 * (J14 * F(4) + J24 * Fpp(4)) * w2 -
          D2 * Fpp(4));

  check_factors({{"omega1 omega2", w1 * w2},
                 {"2*omega1 + omega2", 2.0 * w1 + w2},
                 {"4*omega1 + 2*omega2", 4.0 * w1 + 2.0 * w2}},
                "r5", floor);
  r[4] = 1.0 / (w1 * w2 * (2.0 * w1 + w2) * (4.0 * w1 + 2.0 * w2)) *
         (sp * sp * sp * (U * Fp(1) - 2.0 * Vm * Fpp(1)) -
          sp * sp * (2.0 * cross(2) * sq + Xp * Fpp(2)) - sp * (U * Fp(3) - 2.0 * Vm * Fpp(3)) +
          (2.0 * cross(4) * sq + 2.0 * Xp * Fpp(4)));
  check_factors({{"omega1 omega2", w1 * w2},
                 {"2*omega1 - omega2", 2.0 * w1 - w2},
                 {"4*omega1 - 2*omega2", 4.0 * w1 - 2.0 * w2}},
                "r6", floor);
  // the F3'' bracket carries J21 J22 as printed
  r[5] = -1.0 / (w1 * w2 * (2.0 * w1 - w2) * (4.0 * w1 - 2.0 * w2)) *
         (sm * sm * sm * (U * Fp(1) + 2.0 * Vp * Fpp(1)) +
          sm * sm * (2.0 * cross(2) * sq - 2.0 * Xm * Fpp(2)) -
          sm * (U * Fp(3) + 2.0 * (J21 * J22 * rti + J22 * J23 * rt) * Fpp(3)) -
          (2.0 * cross(4) * sq - 2.0 * Xm * Fpp(4)));

  check_factors({{"omega1^2", w1 * w1}, {"4*omega1^2 - omega2^2", 4.0 * w1 * w1 - w2 * w2}}, "r7", floor);
  r[6] = 1.0 / (3.0 * w1 * w1 * (4.0 * w1 * w1 - w2 * w2)) *
         (8.0 * w1 * w1 * w1 * (J13 * (J13 * F(1) + J23 * Fp(1)) * w1 - D1 * Fpp(1)) -
          2.0 * w1 * (w1 * J13 * (J13 * F(3) + J23 * Fp(3)) - D1 * Fpp(3)) -
          4.0 * w1 * w1 * J21 * (J13 * F(2) + J23 * Fpp(2)) * w1 + J21 * (J13 * Fp(4) + 2.0 * J23 * Fpp(4)));
  check_factors({{"omega2^2", w2 * w2}, {"4*omega2^2 - omega1^2", 4.0 * w2 * w2 - w1 * w1}}, "r8", floor);
  r[7] = -1.0 / (3.0 * w2 * w2 * (4.0 * w2 * w2 - w1 * w1)) *
         (8.0 * w2 * w2 * w2 * (J14 * (J14 * F(1) + J24 * Fp(1)) * w2 - D2 * Fpp(1)) +
          4.0 * w2 * w2 * J22 * (J14 * F(2) + 2.0 * J24 * Fpp(2)) * w2 -
          2.0 * w2 * (w2 * J14 * (J14 * F(3) + J24 * Fp(3)) - D2 * Fpp(3)) -
          J22 * (J14 * Fp(4) + 2.0 * J24 * Fpp(4)));

  check_factors({{"omega1 omega2", w1 * w2},
                 {"2*omega1 + omega2", 2.0 * w1 + w2},
                 {"omega1 + 2*omega2", w1 + 2.0 * w2}},
                "r9", floor);
  r[8] = 1.0 / (w1 * w2 * (2.0 * w1 + w2) * (w1 + 2.0 * w2)) *
         (sp * sp * sp * (cross2(1) * sq + 2.0 * Xp * Fpp(1)) - sp * sp * (U * Fp(2) - 2.0 * Vm * Fpp(2)) -
          sp * (cross2(3) * sq + 2.0 * Xp * Fpp(3)) - (U * Fp(4) - 2.0 * Vm * Fpp(4)));
  check_factors({{"omega1 omega2", w1 * w2},
                 {"2*omega1 - omega2", 2.0 * w1 - w2},
                 {"2*omega2 - omega1", 2.0 * w2 - w1}},
                "r10", floor);
  r[9] = 1.0 / (w1 * w2 * (2.0 * w1 - w2) * (2.0 * w2 - w1)) *
         (sm * sm * sm * (cross2(1) * sq - 2.0 * Xm * Fpp(1)) - sm * sm * (U * Fp(2) + 2.0 * Vp * Fpp(2)) -
          sm * (cross2(3) * sq - 2.0 * Xm * Fpp(3)) + (U * Fp(4) + 2.0 * Vm * Fpp(4)));
  return r;
}

}  // namespace detail

/// r from the F family; s from the same formulas with F replaced by G.
inline RSTable rs_tables(const JEntries& J, const FrequencyPair& w, const FGTable& fg,
                         double floor = kDivisorFloor) {
  return {detail::r_formulas(J, w, fg.F, floor), detail::r_formulas(J, w, fg.G, floor)};
}

inline RSTable rs_tables(const NormalModeData& nm, const FGTable& fg, double floor = kDivisorFloor) {
  return rs_tables(nm.entries(), nm.freq, fg, floor);
}

struct SecondOrder {
  DAlembertSeries x;  // B2^{1,0}
  DAlembertSeries y;  // B2^{0,1}
};

/// Harmonic layout shared by B2^{1,0} (coefficients r) and -B2^{0,1} (s).
inline DAlembertSeries second_order_layout(const std::array<double, 10>& c) {
  DAlembertSeries b;
  b.add(2, 0, 0, 0, c[0], 0.0);
  b.add(0, 2, 0, 0, c[1], 0.0);
  b.add(2, 0, 2, 0, c[2], c[6]);
  b.add(0, 2, 0, 2, c[3], c[7]);
  b.add(1, 1, 1, -1, c[4], c[8]);
  b.add(1, 1, 1, 1, c[5], c[9]);
  return b;
}

inline SecondOrder second_order_closed_form(const RSTable& rs) {
  return {second_order_layout(rs.r), -second_order_layout(rs.s)};
}

}  // namespace l4norm

#endif  // L4NORM_TABLES_HPP
