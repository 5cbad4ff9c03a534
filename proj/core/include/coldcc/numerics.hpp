#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace coldcc::numerics {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  /// Gauss-Hermite only: weights * exp(x^2), for integrands without the
  /// Gaussian factor. Computed directly, so accurate at the outermost nodes.
  std::vector<double> scaled_weights;
};

/// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Hermite rule for the weight exp(-x^2) on the real line.
QuadratureRule gauss_hermite(int n);

/// Legendre polynomial P_l(x).
double legendre(int l, double x);

/// Value and x-derivative of a radial reference function.
struct FunctionValue {
  double value;
  double derivative;
};

/// Riccati-Bessel x j_l(x) (regular, ~ sin(x - l pi/2) at large x).
FunctionValue riccati_j(int l, double x);

/// Riccati-Bessel -x y_l(x) (irregular, ~ cos(x - l pi/2) at large x).
FunctionValue riccati_n(int l, double x);

/// Logarithmic derivative d/dx ln(x k_l(x)) of the exponentially decaying
/// modified Riccati-Bessel function; stable for any x > 0.
double decaying_log_derivative(int l, double x);

/// Natural cubic spline through (x_i, y_i), x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  double front_x() const { return x_.front(); }
  double back_x() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, second_;
};

/// Brent minimisation of f on [a, b]; returns (x_min, f(x_min)).
std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b);

/// Root of f bracketed by [a, b] (f(a), f(b) of opposite sign), to full
/// double precision (TOMS 748).
double find_root(const std::function<double(double)>& f, double a, double b);

/// Least-squares fit y = c0 + c1 * x; returns {c0, c1, rms residual}.
struct LinearFit {
  double intercept;
  double slope;
  double rms_residual;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace coldcc::numerics
