#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "coldcc/error.hpp"
#include "coldcc/experiments.hpp"

using namespace coldcc;
using experiments::Feature;

TEST(Experiments, LogGridEndpoints) {
  const auto g = experiments::log_grid(1e-4, 10.0, 16);
  ASSERT_EQ(g.size(), 16u);
  EXPECT_EQ(g.front(), 1e-4);
  EXPECT_EQ(g.back(), 10.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(std::log(g[i] / g[i - 1]), std::log(1e5) / 15, 1e-12);
  EXPECT_THROW(experiments::log_grid(0.0, 1.0, 3), ConfigError);
}

TEST(Experiments, Presets) {
  const auto fig1 = experiments::energy_preset("fig1");
  EXPECT_DOUBLE_EQ(fig1.front(), 1e-4);
  EXPECT_DOUBLE_EQ(fig1.back(), 10.0);
  for (const char* name : {"23-25", "90-91", "1-100"}) {
    const auto l = experiments::lambda_preset(name);
    EXPECT_GT(l.size(), 100u);
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_GT(l[i], l[i - 1]);
  }
  EXPECT_DOUBLE_EQ(experiments::lambda_preset("90-91").front(), 90.0);
  EXPECT_DOUBLE_EQ(experiments::lambda_preset("90-91").back(), 91.0);
  EXPECT_THROW(experiments::lambda_preset("2-3"), ConfigError);
}

TEST(Experiments, FeatureDetectionMergesAdjacentJumps) {
  const std::vector<double> l = {1, 2, 3, 4, 5, 6, 7};
  const std::vector<std::vector<double>> rates = {{1, 1.5, 40, 0.2, 0.3, 0.3, 9}, {5, 5, 5, 5, 5, 5, 5}};
  const auto f = experiments::detect_features(l, rates, 10.0);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].lambda_lo, 2);
  EXPECT_EQ(f[0].lambda_hi, 4);
  EXPECT_NEAR(f[0].max_ratio, 200.0, 1e-12);
  EXPECT_EQ(f[1].lambda_lo, 6);
  EXPECT_EQ(f[1].lambda_hi, 7);
}

TEST(Experiments, UnmatchedFeatures) {
  const std::vector<Feature> vib = {{90.1, 90.12, 50}, {90.5, 90.51, 20}};
  const std::vector<Feature> rig = {{90.13, 90.14, 30}};
  const auto extra = experiments::unmatched_features(vib, rig, 0.02);
  ASSERT_EQ(extra.size(), 1u);
  EXPECT_DOUBLE_EQ(extra[0].lambda_lo, 90.5);
  EXPECT_EQ(experiments::unmatched_features(vib, {}, 0.1).size(), 2u);
}

TEST(Experiments, ParallelForRunsEveryIndexAndRethrows) {
  std::vector<int> hits(57, 0);
  experiments::parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += static_cast<int>(i); });
  for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i], static_cast<int>(i));
  EXPECT_THROW(experiments::parallel_for(10, 3,
                                         [](std::size_t i) {
                                           if (i == 7) throw std::runtime_error("seven");
                                         }),
               std::runtime_error);
}

namespace {

experiments::ModelSetup small_setup() {
  experiments::ModelSetup s;
  s.levels.N_max = 2;
  s.scattering.L_max = 2;
  return s;
}

}  // namespace

TEST(Experiments, WithLambdaMatchesFreshBuild) {
  auto s = small_setup();
  const auto base = experiments::build_model(s);
  const auto scaled = experiments::with_lambda(experiments::with_lambda(base, 7.0), 3.5);
  s.lambda = 3.5;
  const auto fresh = experiments::build_model(s);
  const double a1 = scatter::scattering_length_at(*scaled.problem, {0, 0, 1}, 1e-6, false).first;
  const double a2 = scatter::scattering_length_at(*fresh.problem, {0, 0, 1}, 1e-6, false).first;
  EXPECT_NEAR(a1, a2, 1e-10 * std::abs(a2));
}

TEST(Experiments, RatesIndependentOfThreadCount) {
  const auto model = experiments::build_model(small_setup());
  const std::vector<double> E = {1e-6, 1e-3, 0.5};
  experiments::RateOptions o;
  const auto one = experiments::compute_rates(model, E, o);
  o.threads = 3;
  const auto three = experiments::compute_rates(model, E, o);
  ASSERT_EQ(one.exits.size(), 3u);
  for (std::size_t i = 0; i < E.size(); ++i) {
    EXPECT_EQ(one.points[i].sigma_cm2, three.points[i].sigma_cm2);
    EXPECT_EQ(one.points[i].sigma_inelastic_cm2, three.points[i].sigma_inelastic_cm2);
    EXPECT_GT(one.rate(i, 1), 0.0);
    EXPECT_NEAR(one.points[i].sigma_inelastic_cm2, one.points[i].sigma_cm2[1] + one.points[i].sigma_cm2[2],
                1e-12 * one.points[i].sigma_inelastic_cm2);
  }
}

TEST(Experiments, StepHalvingDeltaReported) {
  const auto model = experiments::build_model(small_setup());
  experiments::RateOptions o;
  o.step_halving_check = true;
  const std::vector<double> E = {1e-3};
  const auto t = experiments::compute_rates(model, E, o);
  ASSERT_TRUE(t.points[0].convergence.step_halving_delta.has_value());
  EXPECT_LT(*t.points[0].convergence.step_halving_delta, 1e-2);
}

TEST(Experiments, BoundStatesNonDecreasingAndPolesMatch) {
  auto s = small_setup();
  s.scattering.jtot.automatic = false;
  s.scattering.jtot.jtot_min = s.scattering.jtot.jtot_max = 1;
  experiments::PoleSearchOptions o;
  o.initial_points = 8;
  const auto r = experiments::find_poles(s, 1.0, 4.0, o);
  EXPECT_EQ(r.unresolved_intervals, 0);
  EXPECT_EQ(r.poles(), r.bound_state_change());
  EXPECT_GE(r.poles(), 1);
  for (std::size_t i = 1; i < r.pole_lambdas.size(); ++i) EXPECT_GT(r.pole_lambdas[i], r.pole_lambdas[i - 1]);

  const std::vector<double> lambdas = {1.0, 2.0, 3.0, 4.0};
  const auto scan = experiments::lambda_scan(s, lambdas, {});
  for (std::size_t i = 1; i < scan.points.size(); ++i)
    EXPECT_GE(scan.points[i].bound_states, scan.points[i - 1].bound_states);
  EXPECT_EQ(scan.points.front().bound_states, r.bound_states_lo);
  EXPECT_EQ(scan.points.back().bound_states, r.bound_states_hi);
}

TEST(Experiments, CompareTablesIdenticalInputs) {
  experiments::RateTable t;
  t.exits = {{0, 0, 1, 1}, {0, 0, 1, 0}};
  for (double E : {1.0, 2.0}) {
    experiments::RatePoint p;
    p.energy_K = E;
    p.sigma_cm2 = {1e-15, 1e-20};
    p.sigma_inelastic_cm2 = 1e-20;
    t.points.push_back(p);
  }
  auto u = t;
  u.points[1].sigma_cm2[1] = 1.5e-20;
  const auto c = experiments::compare_tables(t, u, {false, true});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].max_relative, 0.0);
  EXPECT_NEAR(c[1].max_relative, 0.5, 1e-12);
  EXPECT_EQ(c[1].max_relative_off_resonance, 0.0);
  EXPECT_EQ(c[1].off_resonance_points, 1u);
  EXPECT_EQ(c[2].exit, "inelastic_total");
}
