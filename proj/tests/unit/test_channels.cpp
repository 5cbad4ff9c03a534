#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <tuple>

#include "angular_oracle.hpp"
#include "coldcc/channels.hpp"
#include "coldcc/error.hpp"
#include "coldcc/units.hpp"

using namespace coldcc;
using channels::Parity;

namespace {

channels::BasisLimits limits(int N_max, int L_max) {
  channels::BasisLimits b;
  b.levels.N_max = N_max;
  b.L_max = L_max;
  return b;
}

struct Fixture {
  molecule::DiatomModel model = molecule::default_oxygen17_model();
  molecule::MolecularStructure structure = molecule::molecular_levels(model, {}, molecule::RotorMode::rigid);
  pes::InteractionSurface surface = pes::InteractionSurface::model(pes::default_model_parameters());
  pes::VibronicCouplingTable table = pes::vibrational_average(surface, structure, model);
  double mu = units::reduced_mass(units::kMassHelium3, units::kMassOxygen17 * 2);
};

}  // namespace

TEST(Channels, BasisContentsAndOrdering) {
  const auto basis = channels::build_basis(1, Parity::even, limits(2, 8));
  for (const auto& c : basis) {
    EXPECT_EQ(c.N % 2, 0);
    EXPECT_TRUE(std::abs(c.J - c.L) <= 1 && c.J + c.L >= 1) << channels::label(c);
  }
  EXPECT_TRUE(std::is_sorted(basis.begin(), basis.end(), [](const auto& a, const auto& b) {
    return std::tie(a.v, a.N, a.J, a.L) < std::tie(b.v, b.N, b.J, b.L);
  }));
  // N = 0, J = 1: L = 0, 2 for even parity
  EXPECT_EQ(basis[0].L, 0);
  EXPECT_EQ(basis[1].L, 2);
  EXPECT_EQ(channels::build_basis(1, Parity::odd, limits(0, 8)).size(), 1u);
}

TEST(Channels, RecouplingMatchesAngularQuadrature) {
  const int jtot = 1;
  const oracle::AngularQuadrature quad(9, 16);
  for (Parity p : {Parity::even, Parity::odd}) {
    const auto basis = channels::build_basis(jtot, p, limits(4, 8));
    std::vector<oracle::AngularQuadrature::Samples> samples;
    for (const auto& c : basis) samples.push_back(quad.sample({c.N, c.J, c.L}, jtot));
    for (std::size_t a = 0; a < basis.size(); ++a) {
      EXPECT_NEAR(quad.element(samples[a], samples[a], 0), 1.0, 1e-12);
      for (std::size_t b = a; b < basis.size(); ++b)
        for (int l : {0, 2, 4}) {
          const auto& x = basis[a];
          const auto& y = basis[b];
          const double lib = channels::recoupling_coefficient(l, x.N, x.J, x.L, y.N, y.J, y.L, jtot);
          EXPECT_NEAR(lib, quad.element(samples[a], samples[b], l), 1e-10)
              << l << " " << channels::label(x) << " " << channels::label(y);
          EXPECT_NEAR(lib, channels::recoupling_coefficient(l, y.N, y.J, y.L, x.N, x.J, x.L, jtot), 1e-14);
        }
    }
  }
}

TEST(Channels, CouplingMatrixIsSymmetricWithFreeAsymptotics) {
  Fixture f;
  const channels::CouplingMatrix W(f.structure, f.table, 1, Parity::even, 8, f.mu);
  const Eigen::MatrixXd w = W.W(8.0);
  EXPECT_LT((w - w.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  // beyond the taper only thresholds and centrifugal terms remain
  const Eigen::MatrixXd far = W.W(420.0) - W.internal_hamiltonian();
  for (int i = 0; i < W.size(); ++i)
    for (int j = 0; j < W.size(); ++j) {
      if (i == j) continue;
      EXPECT_NEAR(far(i, j), 0.0, 1e-12) << channels::label(W.channels()[i]) << " " << channels::label(W.channels()[j]);
    }
}

TEST(Channels, ConventionsShareSpectrum) {
  Fixture f;
  const channels::CouplingMatrix A(f.structure, f.table, 1, Parity::even, 8, f.mu, channels::Convention::nominal);
  const channels::CouplingMatrix B(f.structure, f.table, 1, Parity::even, 8, f.mu, channels::Convention::eigenbasis);
  for (double R : {5.0, 9.0, 30.0}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A.W(R)), eb(B.W(R));
    EXPECT_LT((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff(), 1e-9);
  }
  // asymptotic thresholds agree with the molecular levels
  const auto& block = f.structure.block(1);
  for (const auto& c : A.asymptotic_channels()) {
    bool found = false;
    for (Eigen::Index k = 0; k < block.eigenvalues.size(); ++k) found = found || std::abs(block.eigenvalues(k) - c.threshold_K) < 1e-9;
    if (c.J == 1) EXPECT_TRUE(found) << channels::label(c);
  }
}

TEST(Channels, AdiabatsApproachThresholds) {
  Fixture f;
  const channels::CouplingMatrix W(f.structure, f.table, 1, Parity::even, 8, f.mu);
  const auto curves = channels::adiabatic_curves(W, {6.0, 449.0});
  ASSERT_EQ(curves.size(), 2u);
  std::vector<double> asym;
  for (const auto& c : W.asymptotic_channels()) {
    const double cent = c.L * (c.L + 1.0) / (2.0 * W.reduced_mass_au() * 449.0 * 449.0) * units::kHartreeToKelvin;
    asym.push_back(c.threshold_K + cent);
  }
  std::sort(asym.begin(), asym.end());
  for (std::size_t i = 0; i < asym.size(); ++i) EXPECT_NEAR(curves[1].energies_K(i), asym[i], 1e-9);
  EXPECT_LT(curves[0].energies_K(0), -10.0);
}
