#include <array>
#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "l4norm/model.hpp"

using namespace l4norm;
using HP = boost::multiprecision::cpp_bin_float_50;

namespace {

const double kS3 = std::sqrt(3.0);

ModelParams perturbed_point() { return ModelParams::perturbed(0.01, 2e-3, 1e-3, 5e-4); }

}  // namespace

TEST(ModelParams, RejectsMassRatioOutsideHalfInterval) {
  EXPECT_THROW(ModelParams::make(0.7, 1.0, 0.0, INFINITY), ParameterError);
  EXPECT_THROW(ModelParams::make(0.0, 1.0, 0.0, INFINITY), ParameterError);
  EXPECT_NO_THROW(ModelParams::make(0.5, 1.0, 0.0, INFINITY));
}

TEST(ModelParams, RejectsUnphysicalRadiationAndDrag) {
  EXPECT_THROW(ModelParams::make(0.01, 0.0, 0.0, 1e4), ParameterError);
  EXPECT_THROW(ModelParams::make(0.01, 1.1, 0.0, 1e4), ParameterError);
  EXPECT_THROW(ModelParams::make(0.01, 0.99, 0.0, 0.0), ParameterError);
  EXPECT_THROW(ModelParams::make(0.01, 0.99, -1e-3, 1e4), ParameterError);
  EXPECT_THROW(ModelParams::perturbed(0.01, 0.0, 0.0, -1e-3), ParameterError);
}

TEST(ModelParams, DragStrengthFollowsSpeedOfLight) {
  const auto p = ModelParams::make(0.01, 0.99, 0.0, 1e4);
  EXPECT_DOUBLE_EQ(p.W1(), 0.99 * 0.01 / 1e4);
  EXPECT_EQ(ModelParams::make(0.01, 0.99, 0.0, INFINITY).W1(), 0.0);
  EXPECT_DOUBLE_EQ(p.n2(), 1.0);
  EXPECT_DOUBLE_EQ(ModelParams::perturbed(0.01, 0.0, 0.02, 0.0).n2(), 1.03);
}

TEST(ModelParams, WarnsOnLargePerturbation) {
  EXPECT_TRUE(ModelParams::perturbed(0.01, 0.0, 0.0, 0.0).warnings().empty());
  EXPECT_EQ(ModelParams::perturbed(0.01, 0.2, 0.0, 0.0).warnings().size(), 1u);
}

TEST(Model, CollisionGuardAtEitherPrimary) {
  const auto p = ModelParams::perturbed(0.01, 0.0, 0.0, 0.0);
  EXPECT_THROW(effective_potential(State{-0.01, 0.0, 0.0, 0.0}, p), CollisionError);
  EXPECT_THROW(effective_potential(State{0.99, 0.0, 0.0, 0.0}, p), CollisionError);
}

TEST(Model, DragAngleBranchCut) {
  const auto p = ModelParams::perturbed(0.01, 0.0, 0.0, 1e-3);
  EXPECT_THROW(lagrangian(State{-0.5, 0.0, 0.0, 0.0}, p), BranchCutError);
  EXPECT_NO_THROW(lagrangian(State{-0.5, 1e-3, 0.0, 0.0}, p));
}

TEST(Model, GradientMatchesHighPrecisionDifference) {
  const auto p = perturbed_point();
  const HP h("1e-20");
  for (auto [x, y] : std::array<std::pair<double, double>, 3>{{{0.49, 0.86}, {0.2, -0.5}, {-0.7, 0.3}}}) {
    const HP X(x), Y(y);
    auto U = [&](const HP& a, const HP& b) { return effective_potential(BasicState<HP>{a, b, 0, 0}, p); };
    const HP gx = (U(X + h, Y) - U(X - h, Y)) / (2 * h);
    const HP gy = (U(X, Y + h) - U(X, Y - h)) / (2 * h);
    const auto g = potential_gradient(x, y, p);
    EXPECT_NEAR(g.x, static_cast<double>(gx), 1e-13);
    EXPECT_NEAR(g.y, static_cast<double>(gy), 1e-13);
  }
}

TEST(Model, HessianMatchesHighPrecisionDifference) {
  const auto p = perturbed_point();
  const HP h("1e-20"), X(0.49), Y(0.86);
  auto g = [&](const HP& a, const HP& b) { return potential_gradient(a, b, p); };
  const auto hx = (g(X + h, Y).x - g(X - h, Y).x) / (2 * h);
  const auto hxy = (g(X, Y + h).x - g(X, Y - h).x) / (2 * h);
  const auto hy = (g(X, Y + h).y - g(X, Y - h).y) / (2 * h);
  const auto s = potential_hessian(0.49, 0.86, p);
  EXPECT_NEAR(s.xx, static_cast<double>(hx), 1e-12);
  EXPECT_NEAR(s.xy, static_cast<double>(hxy), 1e-12);
  EXPECT_NEAR(s.yy, static_cast<double>(hy), 1e-12);
}

TEST(Model, ClassicalTriangularPointIsAtRest) {
  for (double mu : {0.001, 0.01, 0.2}) {
    const auto p = ModelParams::perturbed(mu, 0.0, 0.0, 0.0);
    const auto f = rest_force(0.5 - mu, kS3 / 2.0, p);
    EXPECT_NEAR(f.x, 0.0, 1e-14);
    EXPECT_NEAR(f.y, 0.0, 1e-14);
  }
}

// H = -L + p.v must reproduce the energy integral for every state.
TEST(Model, LegendreTransformGivesEnergyIntegral) {
  const auto p = perturbed_point();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 50; ++i) {
    const State s{0.49 + u(rng), 0.86 + u(rng), u(rng), u(rng)};
    const auto c = momenta(s, p);
    EXPECT_NEAR(hamiltonian(c, p), energy_integral(s, p), 1e-13);
    const auto back = velocities(c, p);
    EXPECT_NEAR(back.xdot, s.xdot, 1e-15);
    EXPECT_NEAR(back.ydot, s.ydot, 1e-15);
  }
}

// Without drag the equations of motion conserve the Jacobi-type integral.
TEST(Model, DragFreeFlowConservesEnergy) {
  using Phase = std::array<double, 4>;
  const auto p = ModelParams::perturbed(0.01, 2e-3, 1e-3, 0.0);
  auto rhs = [&](const Phase& z, Phase& dz, double) {
    const State s{z[0], z[1], z[2], z[3]};
    const auto a = eom_rhs(s, p);
    dz = {z[2], z[3], a.x, a.y};
  };
  Phase z{0.5, 0.87, 0.001, -0.002};
  const double h0 = energy_integral(State{z[0], z[1], z[2], z[3]}, p);
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<Phase>>(1e-13, 1e-13), rhs, z, 0.0,
                          30.0, 0.01);
  EXPECT_NEAR(energy_integral(State{z[0], z[1], z[2], z[3]}, p), h0, 1e-10);
}

// The drag force is dissipative: it is not generated by the Lagrangian, so the
// same integral drifts once W1 > 0.
TEST(Model, DragBreaksEnergyConservation) {
  using Phase = std::array<double, 4>;
  const auto p = ModelParams::perturbed(0.01, 0.0, 0.0, 1e-3);
  auto rhs = [&](const Phase& z, Phase& dz, double) {
    const auto a = eom_rhs(State{z[0], z[1], z[2], z[3]}, p);
    dz = {z[2], z[3], a.x, a.y};
  };
  Phase z{0.5, 0.87, 0.01, -0.02};
  const double h0 = energy_integral(State{z[0], z[1], z[2], z[3]}, p);
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<Phase>>(1e-12, 1e-12), rhs, z, 0.0,
                          10.0, 0.01);
  EXPECT_GT(std::abs(energy_integral(State{z[0], z[1], z[2], z[3]}, p) - h0), 1e-7);
}
