#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "coldcc/error.hpp"
#include "coldcc/molecule.hpp"
#include "coldcc/units.hpp"

using namespace coldcc;
using namespace coldcc::molecule;

namespace {

// Analytic Morse levels for N = 0: omega (n + 1/2) - omega x (n + 1/2)^2,
// measured from the well bottom.
double morse_level(const MorsePotential& m, double mu_amu, int n) {
  const double mu = mu_amu * units::kAmuToElectronMass;
  const double De = units::to_hartree(m.well_depth_K);
  const double omega = m.range_inv_bohr * std::sqrt(2.0 * De / mu);
  const double omega_x = omega * omega / (4.0 * De);
  const double x = n + 0.5;
  return units::to_kelvin(omega * x - omega_x * x * x);
}

}  // namespace

TEST(Molecule, DefaultModelHitsSpectroscopicAnchors) {
  const auto model = default_oxygen17_model();
  EXPECT_NO_THROW(model.validate());
  EXPECT_NEAR(model.rigid_rotational_constant_K(), 1.95, 0.02 * 1.95);
  const auto states = solve_radial(model, 0, 2);
  const double De = model.potential.morse()->well_depth_K;
  EXPECT_NEAR(states[0].energy_K + De, 1100.0, 0.02 * 1100.0);
  EXPECT_NEAR(states[1].energy_K - states[0].energy_K, 2175.0, 0.01 * 2175.0);
}

TEST(Molecule, SincDvrReproducesAnalyticMorse) {
  const auto model = default_oxygen17_model();
  const auto& m = *model.potential.morse();
  const auto states = solve_radial(model, 0, 4);
  for (int n = 0; n < 4; ++n) {
    const double exact = morse_level(m, model.reduced_mass_amu, n);
    EXPECT_NEAR((states[n].energy_K + m.well_depth_K) / exact, 1.0, 1e-8) << n;
    EXPECT_EQ(states[n].wavefunction.interior_nodes(), n);
  }
}

TEST(Molecule, RadialStatesAreOrthonormal) {
  const auto model = default_oxygen17_model();
  const auto s0 = solve_radial(model, 0, 2);
  const auto s4 = solve_radial(model, 4, 1);
  EXPECT_NEAR(s0[0].wavefunction.overlap(s0[0].wavefunction), 1.0, 1e-12);
  EXPECT_NEAR(s0[0].wavefunction.overlap(s0[1].wavefunction), 0.0, 1e-12);
  // centrifugal distortion barely changes the ground vibrational function
  EXPECT_GT(s0[0].wavefunction.overlap(s4[0].wavefunction), 0.999);
}

TEST(Molecule, CalibrationRoundTrip) {
  const double mu = units::reduced_mass(units::kMassOxygen17, units::kMassOxygen17);
  const auto m = calibrate_morse(2000.0, 1020.0, 2.3, mu);
  const double e0 = morse_level(m, mu, 0);
  const double e1 = morse_level(m, mu, 1);
  EXPECT_NEAR(e0, 1020.0, 1e-9);
  EXPECT_NEAR(e1 - e0, 2000.0, 1e-9);
}

TEST(Molecule, FineStructureClosedForms) {
  // Hund's case (b) 3-Sigma, diagonal in N: the textbook expressions
  //   J = N+1:  gamma N - 2 lambda N / (3 (2N+3))
  //   J = N  :  -gamma + 2 lambda / 3
  //   J = N-1: -gamma (N+1) - 2 lambda (N+1) / (3 (2N-1))
  const FineStructureConstants c{2.7, -0.011};
  for (int N = 2; N <= 8; N += 2) {
    const double lam = c.lambda_ss_K, g = c.gamma_sr_K;
    EXPECT_NEAR(spin_rotation_element(c, N, N + 1) + spin_spin_element(c, N, N, N + 1),
                g * N - 2.0 * lam * N / (3.0 * (2 * N + 3)), 1e-13);
    EXPECT_NEAR(spin_rotation_element(c, N, N) + spin_spin_element(c, N, N, N), -g + 2.0 * lam / 3.0, 1e-13);
    EXPECT_NEAR(spin_rotation_element(c, N, N - 1) + spin_spin_element(c, N, N, N - 1),
                -g * (N + 1) - 2.0 * lam * (N + 1) / (3.0 * (2 * N - 1)), 1e-13);
  }
  // N = 0 has only J = 1 and no diagonal fine structure
  EXPECT_NEAR(spin_spin_element(c, 0, 0, 1), 0.0, 1e-15);
  // off-diagonal N -> N+2 coupling at J = N+1: -2 lambda sqrt((N+1)(N+2)) / (2N+3)
  for (int N = 0; N <= 6; N += 2)
    EXPECT_NEAR(std::abs(spin_spin_element(c, N, N + 2, N + 1)),
                2.0 * c.lambda_ss_K * std::sqrt((N + 1.0) * (N + 2.0)) / (2 * N + 3), 1e-13);
  EXPECT_EQ(spin_spin_element(c, 0, 4, 1), 0.0);
}

TEST(Molecule, FineStructureBlockRejectsMixedParity) {
  const FineStructureConstants c{2.7, -0.011};
  const int bad[] = {0, 1};
  EXPECT_THROW(fine_structure_block(c, 2.0, 1, bad), Error);
}

TEST(Molecule, RigidLevelsHaveRotorSpacing) {
  const auto model = default_oxygen17_model();
  const auto s = molecular_levels(model, LevelLimits{}, RotorMode::rigid);
  const double B = model.rigid_rotational_constant_K();
  std::set<int> v_seen;
  double e22 = 0.0;
  for (const auto& l : s.levels()) {
    v_seen.insert(l.v);
    if (l.N == 2 && l.J == 2) e22 = l.energy_K;
    if (l.N == 0) EXPECT_NEAR(l.energy_K, 0.0, 1e-12);
  }
  EXPECT_EQ(v_seen, std::set<int>{0});
  const double lam = model.fine_structure.lambda_ss_K;
  EXPECT_NEAR(e22, 6.0 * B, 2.0 * std::abs(lam));
}

TEST(Molecule, FineStructureIsSmallComparedWithRotation) {
  const auto model = default_oxygen17_model();
  const double B = model.rigid_rotational_constant_K();
  EXPECT_LT(std::abs(model.fine_structure.lambda_ss_K), 6.0 * B);
  EXPECT_LT(std::abs(model.fine_structure.gamma_sr_K), 0.01 * B);
}

TEST(Molecule, VibratingLevelsIncludeExcitedManifold) {
  const auto model = default_oxygen17_model();
  LevelLimits lim;
  lim.v_max = 1;
  const auto s = molecular_levels(model, lim, RotorMode::vibrating);
  int n_v1 = 0;
  double gap = 0.0;
  for (const auto& l : s.levels()) {
    if (l.v == 1) {
      ++n_v1;
      EXPECT_LE(l.N, lim.N_max_excited);
      if (l.N == 0) gap = l.energy_K;
    }
    EXPECT_GT(l.dominant_weight, 0.9);
  }
  EXPECT_GT(n_v1, 0);
  EXPECT_NEAR(gap, 2175.0, 0.01 * 2175.0);
}

TEST(Molecule, ValidationErrors) {
  const auto model = default_oxygen17_model();
  LevelLimits odd;
  odd.N_max = 7;
  EXPECT_THROW(molecular_levels(model, odd, RotorMode::rigid), ConfigError);
  LevelLimits vib;
  vib.v_max = 1;
  EXPECT_THROW(molecular_levels(model, vib, RotorMode::rigid), ConfigError);
  auto bad = model;
  bad.reduced_mass_amu = -1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}
