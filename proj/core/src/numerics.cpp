#include "coldcc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace coldcc::numerics {

namespace {

// Eigen-decomposition of the symmetric tridiagonal Jacobi matrix.
QuadratureRule golub_welsch(int n, const std::function<double(int)>& offdiag, double mu0) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = offdiag(k);
    jacobi(k - 1, k) = offdiag(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  auto rule = golub_welsch(n, [](int k) { return k / std::sqrt(4.0 * k * k - 1.0); }, 2.0);
  // Newton polish of the nodes, weights from the derivative formula.
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i];
    double dp = 0.0;
    for (int iter = 0; iter < 4; ++iter) {
      const double p = std::legendre(n, x);
      const double pm = std::legendre(n - 1, x);
      dp = n * (x * p - pm) / (x * x - 1.0);
      x -= p / dp;
    }
    const double p = std::legendre(n, x);
    const double pm = std::legendre(n - 1, x);
    dp = n * (x * p - pm) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  auto rule = golub_welsch(n, [](int k) { return std::sqrt(0.5 * k); }, std::sqrt(std::numbers::pi));
  // Newton polish on the normalised Hermite function phi_n, then Christoffel
  // weights 1 / sum_j phi_j(x)^2, which equal w exp(x^2) without cancellation.
  auto hermite_functions = [n](double x, double& sum_sq, double& phi_nm1) {
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * x * x);
    sum_sq = 0.0;
    for (int j = 0; j < n; ++j) {
      sum_sq += cur * cur;
      const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
    }
    phi_nm1 = prev;
    return cur;
  };
  rule.scaled_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = rule.nodes[i], sum_sq = 0.0, phi_nm1 = 0.0;
    for (int iter = 0; iter < 3; ++iter) {
      const double phi_n = hermite_functions(x, sum_sq, phi_nm1);
      const double dphi = std::sqrt(2.0 * n) * phi_nm1 - x * phi_n;
      if (dphi != 0.0) x -= phi_n / dphi;
    }
    hermite_functions(x, sum_sq, phi_nm1);
    rule.nodes[i] = x;
    rule.scaled_weights[i] = 1.0 / sum_sq;
    rule.weights[i] = rule.scaled_weights[i] * std::exp(-x * x);
  }
  return rule;
}

double legendre(int l, double x) { return std::legendre(static_cast<unsigned>(l), x); }

FunctionValue riccati_j(int l, double x) {
  const auto ul = static_cast<unsigned>(l);
  const double jl = std::sph_bessel(ul, x);
  const double jl1 = std::sph_bessel(ul + 1, x);
  return {x * jl, (l + 1) * jl - x * jl1};
}

FunctionValue riccati_n(int l, double x) {
  const auto ul = static_cast<unsigned>(l);
  const double yl = std::sph_neumann(ul, x);
  const double yl1 = std::sph_neumann(ul + 1, x);
  return {-x * yl, -((l + 1) * yl - x * yl1)};
}

double decaying_log_derivative(int l, double x) {
  // Scaled functions x k_l(x) e^x obey k_{l+1} = k_{l-1} + (2l+1)/x k_l.
  double prev = 1.0;           // l = -1 (k_{-1} = k_0)
  double cur = 1.0;            // l = 0
  for (int n = 0; n < l; ++n) {
    const double next = prev + (2.0 * n + 1.0) / x * cur;
    prev = cur;
    cur = next;
  }
  return -prev / cur - l / x;
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("CubicSpline: need at least two matching points");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("CubicSpline: abscissae must increase strictly");
  second_.assign(n, 0.0);
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double sig = (x_[i] - x_[i - 1]) / (x_[i + 1] - x_[i - 1]);
    const double p = sig * second_[i - 1] + 2.0;
    second_[i] = (sig - 1.0) / p;
    const double d = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]) - (y_[i] - y_[i - 1]) / (x_[i] - x_[i - 1]);
    u[i] = (6.0 * d / (x_[i + 1] - x_[i - 1]) - sig * u[i - 1]) / p;
  }
  second_[n - 1] = 0.0;
  for (std::size_t k = n - 1; k-- > 0;) second_[k] = second_[k] * second_[k + 1] + u[k];
}

double CubicSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  std::size_t hi = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
  hi = std::clamp<std::size_t>(hi, 1, n - 1);
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - x) / h;
  const double b = (x - x_[lo]) / h;
  return a * y_[lo] + b * y_[hi] + ((a * a * a - a) * second_[lo] + (b * b * b - b) * second_[hi]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t n = x_.size();
  std::size_t hi = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
  hi = std::clamp<std::size_t>(hi, 1, n - 1);
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - x) / h;
  const double b = (x - x_[lo]) / h;
  return (y_[hi] - y_[lo]) / h + ((1.0 - 3.0 * a * a) * second_[lo] + (3.0 * b * b - 1.0) * second_[hi]) * h / 6.0;
}

std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b) {
  const auto result = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits / 2);
  return {result.first, result.second};
}

double find_root(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("find_root: interval does not bracket a root");
  std::uintmax_t max_iter = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      f, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits - 2), max_iter);
  return 0.5 * (lo + hi);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - intercept - slope * x[i];
    ss += r * r;
  }
  return {intercept, slope, std::sqrt(ss / n)};
}

}  // namespace coldcc::numerics
