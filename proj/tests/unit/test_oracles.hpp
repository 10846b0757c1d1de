// Independent reference computations for the test suite. These deliberately
// avoid the library's quadrature paths: composite Simpson on explicit grids,
// closed-form Beta moments, and Lorentzian limits for boundary values.
#pragma once

#include <cmath>
#include <complex>
#include <functional>

namespace test_oracles {

// composite Simpson with 2n panels
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  const int m = 2 * n;
  const double h = (b - a) / m;
  double acc = f(a) + f(b);
  for (int i = 1; i < m; ++i) acc += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline std::complex<double> simpson_cx(
    const std::function<std::complex<double>(double)>& f, double a, double b,
    int n) {
  const int m = 2 * n;
  const double h = (b - a) / m;
  std::complex<double> acc = f(a) + f(b);
  for (int i = 1; i < m; ++i)
    acc += f(a + h * i) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

// Closed-form moments of the power-law density c l^{nu+1/2} (1+l)^{-p}:
//   m_k(0) = B(nu + 3/2 - k, p - nu - 3/2 + k) / B(nu + 3/2, p - nu - 3/2).
inline double power_law_moment0(int nu, double p, int k) {
  return beta_fn(nu + 1.5 - k, p - nu - 1.5 + k) / beta_fn(nu + 1.5, p - nu - 1.5);
}

// int mu w dl in the r = sqrt(l) variable over [0, r_max] (tail ignored;
// pick r_max large enough for the target tolerance)
inline double measure_integral(const std::function<double(double)>& mu,
                               const std::function<double(double)>& w,
                               double r_max, int n = 200000) {
  return simpson(
      [&](double r) {
        const double l = r * r;
        const double v = 2.0 * r * mu(l);
        return w ? v * w(l) : v;
      },
      0.0, r_max, n);
}

// P.V. integral via the vanishing-epsilon Lorentzian limit with two-level
// Richardson extrapolation in epsilon^2 (grid kept much finer than epsilon)
inline double pv_lorentzian(const std::function<double(double)>& mu, double x,
                            double r_max, double eps = 0.05) {
  auto reg = [&](double e) {
    return measure_integral(
        mu, [x, e](double l) { return (l - x) / ((l - x) * (l - x) + e * e); },
        r_max, 400000);
  };
  const double v1 = reg(eps);
  const double v2 = reg(eps / 2.0);
  const double v4 = reg(eps / 4.0);
  return (64.0 * v4 - 20.0 * v2 + v1) / 45.0;
}

}  // namespace test_oracles
