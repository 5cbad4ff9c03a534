#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "coldcc/error.hpp"
#include "coldcc/numerics.hpp"
#include "coldcc/scatter.hpp"
#include "coldcc/units.hpp"
#include "fixtures.hpp"
#include "numerov_oracle.hpp"

using namespace coldcc;
using scatter::StateRef;

namespace {

const double kMu = fixtures::collision_mass() * units::kAmuToElectronMass;

channels::AngularChannel single(int L) { return {0, 0, 1, L, 1, 0.0}; }

// One channel with centrifugal barrier and potential V (K).
propagator::PropagationResult propagate_single(int L, double E_K, const std::function<double(double)>& V_K,
                                               const propagator::PropagationGrid& g, double y0 = 1e8) {
  propagator::PropagationOptions opt;
  opt.initial_log_derivative = y0;
  const propagator::QFiller fill = [&](double R, Eigen::MatrixXd& Q) {
    Q(0, 0) = 2.0 * kMu * units::to_hartree(E_K - V_K(R)) - L * (L + 1.0) / (R * R);
  };
  return propagator::propagate(1, fill, g, opt);
}

double morse_tail(double R) {
  const double x = std::exp(-0.9 * (R - 6.5));
  return 40.0 * ((1.0 - x) * (1.0 - x) - 1.0);
}

}  // namespace

TEST(Propagator, FreeChannelLogDerivative) {
  const propagator::PropagationGrid g{1e-3, 5.0, 23.3, 0.002, 0.01};
  const double E = 0.5;
  const double k = std::sqrt(2.0 * kMu * units::to_hartree(E));
  const auto r = propagate_single(0, E, [](double) { return 0.0; }, g);
  const double phase = std::atan(k / 1e8);
  const double exact = k / std::tan(k * (g.R_max - g.R_start) + phase);
  EXPECT_NEAR(r.Y(0, 0) / exact, 1.0, 1e-9);
}

TEST(Propagator, HardSphereLimit) {
  // no potential at all: the wall at R_start is a hard sphere of that radius
  const propagator::PropagationGrid g{};
  const double E = 1e-8;
  const auto r = propagate_single(0, E, [](double) { return 0.0; }, g);
  const auto m = scatter::match(r.Y, {single(0)}, g.R_max, E, kMu);
  EXPECT_NEAR(-m.K(0, 0) / m.k(0), g.R_start, 1e-6);
}

TEST(Propagator, SingularStepIsReported) {
  // two inner steps of h = 0.5; Q chosen so that 1 + h Y vanishes exactly at the first step
  const propagator::PropagationGrid g{1.0, 2.0, 3.0, 0.5, 0.5};
  propagator::PropagationOptions opt;
  opt.initial_log_derivative = 1.0;
  const propagator::QFiller fill = [](double, Eigen::MatrixXd& Q) { Q(0, 0) = 18.0; };
  EXPECT_THROW(propagator::propagate(1, fill, g, opt), NumericalError);
  EXPECT_THROW((propagator::PropagationGrid{5.0, 4.0, 450.0, 0.01, 0.1}.validate()), ConfigError);
}

TEST(Propagator, PhaseShiftsMatchNumerovOracle) {
  // uniform step at the inner-zone value; Numerov runs ten times finer
  const propagator::PropagationGrid g{4.1, 24.0, 60.0, 0.01, 0.01};
  for (int L : {0, 1, 3})
    for (double E : {1e-6, 1e-3, 1.0, 10.0}) {
      const auto r = propagate_single(L, E, morse_tail, g);
      const auto m = scatter::match(r.Y, {single(L)}, g.R_max, E, kMu);
      const double delta = std::atan(m.K(0, 0));
      const oracle::NumerovSetup s{kMu, L, units::to_hartree(E), g.R_start, g.R_max, 1e-3};
      const double ref = oracle::numerov_phase_shift(s, [](double R) { return units::to_hartree(morse_tail(R)); });
      double d = delta - ref;
      d -= std::numbers::pi * std::round(d / std::numbers::pi);
      EXPECT_NEAR(d, 0.0, 1e-7) << "L=" << L << " E=" << E;
    }
}

TEST(Match, RegularFreeSolutionGivesIdentity) {
  const double R = 300.0, E = 0.3;
  const double k = std::sqrt(2.0 * kMu * units::to_hartree(E));
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(3, 3);
  std::vector<channels::AngularChannel> ch;
  for (int L = 0; L < 3; ++L) {
    const auto j = numerics::riccati_j(L, k * R);
    Y(L, L) = k * j.derivative / j.value;
    ch.push_back(single(L));
  }
  const auto m = scatter::match(Y, ch, R, E, kMu);
  EXPECT_LT((m.S - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(scatter::match(Y, ch, R, -1.0, kMu), NumericalError);
}

TEST(Scatter, RateConstantDefinition) {
  const double mu = fixtures::collision_mass();
  const double v = std::sqrt(2.0 * units::to_hartree(1e-3) / (mu * units::kAmuToElectronMass)) * units::kAuVelocityToCmPerS;
  EXPECT_NEAR(scatter::rate_constant(1e-15, 1e-3, mu), v * 1e-15, 1e-30);
  EXPECT_DOUBLE_EQ(scatter::rate_constant(2e-15, 1e-3, mu), 2.0 * scatter::rate_constant(1e-15, 1e-3, mu));
}

class RigidScatter : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { p_ = new fixtures::Problem(fixtures::make_problem(molecule::RotorMode::rigid)); }
  static void TearDownTestSuite() { delete p_; }
  static fixtures::Problem* p_;
};
fixtures::Problem* RigidScatter::p_ = nullptr;

TEST_F(RigidScatter, UltracoldInvariants) {
  const StateRef in{0, 0, 1, 1}, m0{0, 0, 1, 0}, mm{0, 0, 1, -1};
  const auto sol = p_->problem->solve(1e-6, in, {m0, mm});
  EXPECT_LT(sol.max_unitarity_defect(), 1e-8);
  EXPECT_LT(sol.max_symmetry_defect(), 1e-8);
  // both loss channels are populated
  EXPECT_GT(scatter::sigma_M(sol, in, m0), 0.0);
  EXPECT_GT(scatter::sigma_M(sol, in, mm), 0.0);
  // s-wave limit of the elastic cross section
  const auto a = scatter::scattering_length(*p_->problem, {0, 0, 1});
  const double four_pi_a2 = 4.0 * std::numbers::pi * std::pow(a.a_bohr * units::kBohrToCm, 2);
  EXPECT_NEAR(scatter::sigma_M(sol, in, in) / four_pi_a2, 1.0, 1e-3);
}

TEST_F(RigidScatter, DefaultScatteringLength) {
  const auto a = scatter::scattering_length(*p_->problem, {0, 0, 1});
  EXPECT_NEAR(a.a_bohr, -2.9, 0.1);
  EXPECT_LT(a.fit_rms, 1e-6);
}

TEST_F(RigidScatter, MagneticSumEqualsLevelCrossSection) {
  // above the first N = 2 threshold, so several exit levels are open
  const double E = 12.5;
  const StateRef in{0, 0, 1, 0};
  const auto sol = p_->problem->solve(E, in, {});
  const auto levels = scatter::open_levels(sol);
  ASSERT_GT(levels.size(), 1u);
  double sum_M = 0.0, sum_level = 0.0;
  for (int M = -1; M <= 1; ++M)
    for (const auto& l : levels)
      for (int Mp = -l.J; Mp <= l.J; ++Mp) sum_M += scatter::sigma_M(sol, {0, 0, 1, M}, {l.v, l.N, l.J, Mp}) / 3.0;
  for (const auto& l : levels) sum_level += scatter::sigma_level(sol, {0, 0, 1}, l);
  EXPECT_NEAR(sum_M / sum_level, 1.0, 1e-10);
  EXPECT_LT(scatter::detailed_balance_defect(sol), 1e-6);
}

TEST_F(RigidScatter, InitialLogDerivativeInsensitivity) {
  const StateRef in{0, 0, 1, 1}, mm{0, 0, 1, -1};
  std::vector<double> el, inel;
  for (double y0 : {1e6, 1e8, 1e10}) {
    auto s = p_->problem->settings();
    s.options.initial_log_derivative = y0;
    scatter::ScatteringProblem prob(
        std::make_shared<molecule::MolecularStructure>(*p_->structure), p_->table, s);
    const auto sol = prob.solve(1e-4, in, {mm});
    el.push_back(scatter::sigma_M(sol, in, in));
    inel.push_back(scatter::sigma_M(sol, in, mm));
  }
  for (int i : {0, 2}) {
    EXPECT_LT(std::abs(el[i] / el[1] - 1.0), 1e-6);
    EXPECT_LT(std::abs(inel[i] / inel[1] - 1.0), 1e-6);
  }
}

TEST_F(RigidScatter, BasisConventionsAgree) {
  auto s = p_->problem->settings();
  s.convention = channels::Convention::eigenbasis;
  scatter::ScatteringProblem eig(p_->structure, p_->table, s);
  for (double E : {1e-3, 3.0, 12.5})
    for (auto parity : {channels::Parity::even, channels::Parity::odd}) {
      const auto a = p_->problem->solve_block(1, parity, E);
      const auto b = eig.solve_block(1, parity, E);
      ASSERT_EQ(a.open_channels.size(), b.open_channels.size());
      EXPECT_LT((a.S - b.S).cwiseAbs().maxCoeff(), 1e-8) << E;
    }
}

TEST_F(RigidScatter, JtotSelection) {
  auto s = p_->problem->settings();
  s.jtot.automatic = false;
  s.jtot.jtot_min = 1;
  s.jtot.jtot_max = 1;
  scatter::ScatteringProblem only1(p_->structure, p_->table, s);
  const StateRef in{0, 0, 1, 1};
  const auto full = p_->problem->solve(1e-6, in, {});
  const auto one = only1.solve(1e-6, in, {});
  EXPECT_EQ(one.jtot_max_used, 1);
  for (const auto& b : one.blocks) EXPECT_EQ(b.jtot, 1);
  // the elastic channel is pure s-wave, carried by jtot = J = 1
  EXPECT_NEAR(scatter::sigma_M(one, in, in) / scatter::sigma_M(full, in, in), 1.0, 1e-6);
  EXPECT_THROW(p_->problem->solve(-1.0, in, {}), ConfigError);
}
