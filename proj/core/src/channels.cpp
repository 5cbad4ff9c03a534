#include "coldcc/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <fmt/format.h>

#include "coldcc/angmom.hpp"
#include "coldcc/error.hpp"
#include "coldcc/units.hpp"

namespace coldcc::channels {

namespace {

constexpr int S = molecule::kElectronSpin;

double sign(int exponent) { return exponent % 2 == 0 ? 1.0 : -1.0; }

bool channel_less(const AngularChannel& a, const AngularChannel& b) {
  return std::tie(a.v, a.N, a.J, a.L) < std::tie(b.v, b.N, b.J, b.L);
}

}  // namespace

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

const char* to_string(Convention c) { return c == Convention::nominal ? "nominal" : "eigenbasis"; }

std::string label(const AngularChannel& c) { return fmt::format("v{}N{}J{}L{}", c.v, c.N, c.J, c.L); }

std::vector<AngularChannel> build_basis(int jtot, Parity parity, const BasisLimits& limits) {
  if (jtot < 0 || limits.L_max < 0 || limits.levels.N_max < 0 || limits.levels.v_max < 0)
    throw ConfigError("basis limits must be non-negative");
  std::vector<AngularChannel> basis;
  for (int v = 0; v <= limits.levels.v_max; ++v)
    for (int N = 0; N <= limits.levels.N_max_for(v); N += 2)
      for (int J = std::abs(N - S); J <= N + S; ++J)
        for (int L = std::abs(jtot - J); L <= std::min(jtot + J, limits.L_max); ++L)
          if (channel_parity(N, L) == parity) basis.push_back({v, N, J, L, jtot});
  if (basis.empty())
    throw Error(fmt::format("no channels for jtot={} with {} parity within N_max={}, L_max={}", jtot, to_string(parity),
                            limits.levels.N_max, limits.L_max));
  std::sort(basis.begin(), basis.end(), channel_less);
  return basis;
}

double recoupling_coefficient(int l, int N, int J, int L, int Np, int Jp, int Lp, int jtot) {
  const double six_orbit = angmom::wigner6j(J, L, jtot, Lp, Jp, l);
  if (six_orbit == 0.0) return 0.0;
  const double six_spin = angmom::wigner6j(N, J, S, Jp, Np, l);
  if (six_spin == 0.0) return 0.0;
  const double rot = angmom::reduced_spherical_harmonic(N, l, Np);
  const double orb = angmom::reduced_spherical_harmonic(L, l, Lp);
  // <(J L) jtot | C^l(r) . C^l(R) | (J' L') jtot>, with <(N S) J || C^l || (N' S) J'>
  // reduced to <N || C^l || N'> by the spectator-spin 6j.
  const double mol = sign(N + S + Jp + l) * std::sqrt((2.0 * J + 1.0) * (2.0 * Jp + 1.0)) * six_spin * rot;
  return sign(Jp + L + jtot) * six_orbit * mol * orb;
}

double potential_matrix_element(const AngularChannel& a, const AngularChannel& b,
                                const pes::VibronicCouplingTable& table, double R) {
  if (a.jtot != b.jtot) throw Error("potential_matrix_element: channels have different jtot");
  double sum = 0.0;
  for (int l : table.surface().legendre_orders()) {
    const double f = recoupling_coefficient(l, a.N, a.J, a.L, b.N, b.J, b.L, a.jtot);
    if (f != 0.0) sum += f * table.entry(a.v, a.N, b.v, b.N, l, R);
  }
  return sum;
}

CouplingMatrix::CouplingMatrix(const molecule::MolecularStructure& structure, const pes::VibronicCouplingTable& table,
                               int jtot, Parity parity, int L_max, double reduced_mass_amu, Convention convention)
    : jtot_(jtot),
      parity_(parity),
      convention_(convention),
      mu_(reduced_mass_amu * units::kAmuToElectronMass),
      surface_(table.surface()) {
  if (!(reduced_mass_amu > 0)) throw ConfigError("collision reduced mass must be positive");
  channels_ = build_basis(jtot, parity, BasisLimits{structure.limits(), L_max});
  const auto n = static_cast<Eigen::Index>(channels_.size());

  std::vector<int> state(channels_.size());
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    state[c] = structure.state_index(channels_[c].v, channels_[c].N);
    if (state[c] < 0) throw Error(fmt::format("channel {} has no molecular state", label(channels_[c])));
  }
  if (table.states().size() != structure.vib_rot_states().size())
    throw Error("vibronic table and molecular structure disagree on the state list");

  const double to_q = 2.0 * mu_ * units::kKelvinToHartree;

  // Internal Hamiltonian: diagonal in (J, L), molecular block inside.
  internal_Q_ = Eigen::MatrixXd::Zero(n, n);
  centrifugal_.resize(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto& ca = channels_[a];
    centrifugal_(a) = ca.L * (ca.L + 1.0);
    const auto& block = structure.block(ca.J);
    const auto pa = std::find(block.states.begin(), block.states.end(), state[a]) - block.states.begin();
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& cb = channels_[b];
      if (cb.J != ca.J || cb.L != ca.L) continue;
      const auto pb = std::find(block.states.begin(), block.states.end(), state[b]) - block.states.begin();
      internal_Q_(a, b) = to_q * block.hamiltonian(pa, pb);
    }
  }

  // Angular factors are shared by all terms of one Legendre order.
  std::vector<int> orders = surface_.legendre_orders();
  std::vector<Eigen::MatrixXd> angular(orders.size(), Eigen::MatrixXd::Zero(n, n));
  for (std::size_t k = 0; k < orders.size(); ++k)
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b <= a; ++b) {
        const auto& ca = channels_[a];
        const auto& cb = channels_[b];
        const double f = recoupling_coefficient(orders[k], ca.N, ca.J, ca.L, cb.N, cb.J, cb.L, jtot);
        angular[k](a, b) = f;
        angular[k](b, a) = f;
      }
  for (std::size_t t = 0; t < surface_.terms().size(); ++t) {
    const auto k = std::find(orders.begin(), orders.end(), surface_.terms()[t].legendre) - orders.begin();
    const auto& P = table.profile_matrix(t);
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) M(a, b) = angular[k](a, b) * P(state[a], state[b]);
    term_Q_.push_back(to_q * surface_.lambda_scale() * M);
  }

  // Asymptotic eigen-channels: rotate each (J, L) group by the molecular eigenvectors.
  transform_ = Eigen::MatrixXd::Zero(n, n);
  asymptotic_.clear();
  std::vector<Eigen::Index> column_source;  // column in transform_ before sorting
  {
    Eigen::Index col = 0;
    std::vector<bool> done(channels_.size(), false);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (done[a]) continue;
      const auto& block = structure.block(channels_[a].J);
      std::vector<Eigen::Index> members(block.states.size(), -1);
      for (Eigen::Index b = 0; b < n; ++b)
        if (channels_[b].J == channels_[a].J && channels_[b].L == channels_[a].L) {
          const auto p = std::find(block.states.begin(), block.states.end(), state[b]) - block.states.begin();
          members[p] = b;
          done[b] = true;
        }
      if (std::find(members.begin(), members.end(), Eigen::Index{-1}) != members.end())
        throw Error("channel basis does not contain a complete molecular J block");
      std::vector<bool> used(block.states.size(), false);
      for (Eigen::Index k = 0; k < block.eigenvalues.size(); ++k) {
        for (std::size_t p = 0; p < members.size(); ++p) transform_(members[p], col) = block.eigenvectors(p, k);
        const int dom = block.dominant[k];
        if (used[dom]) throw NumericalError(fmt::format("ambiguous channel labels in molecular J={} block", block.J));
        used[dom] = true;
        const auto& s = structure.vib_rot_states()[block.states[dom]];
        asymptotic_.push_back({s.v, s.N, block.J, channels_[a].L, jtot, block.eigenvalues(k)});
        ++col;
      }
    }
  }
  std::vector<std::size_t> order(asymptotic_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return channel_less(asymptotic_[i], asymptotic_[j]); });
  {
    std::vector<AngularChannel> sorted;
    Eigen::MatrixXd T(n, n);
    for (std::size_t k = 0; k < order.size(); ++k) {
      sorted.push_back(asymptotic_[order[k]]);
      T.col(static_cast<Eigen::Index>(k)) = transform_.col(static_cast<Eigen::Index>(order[k]));
    }
    asymptotic_ = std::move(sorted);
    transform_ = std::move(T);
  }
  // Nominal channels carry the threshold of the level they label.
  for (auto& c : channels_)
    for (const auto& a : asymptotic_)
      if (a == c) c.threshold_K = a.threshold_K;

  if (convention_ == Convention::eigenbasis) {
    const Eigen::MatrixXd& U = transform_;
    internal_Q_ = U.transpose() * internal_Q_ * U;
    for (auto& M : term_Q_) M = (U.transpose() * M * U).eval();
    // Each (J, L) group keeps its L, so the centrifugal term is unchanged by
    // relabelling; re-read it from the eigen-channel list.
    channels_ = asymptotic_;
    for (Eigen::Index a = 0; a < n; ++a) centrifugal_(a) = channels_[a].L * (channels_[a].L + 1.0);
    transform_ = Eigen::MatrixXd::Identity(n, n);
  }
  internal_Q_ = 0.5 * (internal_Q_ + internal_Q_.transpose()).eval();
  for (auto& M : term_Q_) M = 0.5 * (M + M.transpose()).eval();
}

void CouplingMatrix::fill_Q(double R, double E_K, Eigen::MatrixXd& Q) const {
  const double s = surface_.taper()(R);
  Q.noalias() = -internal_Q_;
  if (s != 0.0) {
    const auto& terms = surface_.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) Q.noalias() -= (s * terms[t].shape(R)) * term_Q_[t];
  }
  const double e = 2.0 * mu_ * units::to_hartree(E_K);
  const double inv_R2 = 1.0 / (R * R);
  Q.diagonal().array() += e - centrifugal_.array() * inv_R2;
}

Eigen::MatrixXd CouplingMatrix::W(double R) const {
  Eigen::MatrixXd Q(size(), size());
  fill_Q(R, 0.0, Q);
  return (-units::kHartreeToKelvin / (2.0 * mu_)) * Q;
}

Eigen::MatrixXd CouplingMatrix::internal_hamiltonian() const {
  return (units::kHartreeToKelvin / (2.0 * mu_)) * internal_Q_;
}

std::vector<AdiabatPoint> adiabatic_curves(const CouplingMatrix& W, const std::vector<double>& R_grid) {
  for (std::size_t i = 1; i < R_grid.size(); ++i)
    if (!(R_grid[i] > R_grid[i - 1])) throw Error("adiabatic_curves: R grid must increase strictly");
  std::vector<AdiabatPoint> out;
  out.reserve(R_grid.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  for (double R : R_grid) {
    es.compute(W.W(R));
    const auto n = es.eigenvalues().size();
    std::vector<Eigen::Index> order(n);
    std::vector<int> dom(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::Index imax = 0;
      es.eigenvectors().col(k).cwiseAbs().maxCoeff(&imax);
      dom[k] = static_cast<int>(imax);
      order[k] = k;
    }
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      const double ea = es.eigenvalues()(a), eb = es.eigenvalues()(b);
      if (std::abs(ea - eb) <= 1e-12 * scale) return dom[a] < dom[b];
      return ea < eb;
    });
    AdiabatPoint p{R, Eigen::VectorXd(n), std::vector<int>(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
      p.energies_K(k) = es.eigenvalues()(order[k]);
      p.dominant[k] = dom[order[k]];
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace coldcc::channels
