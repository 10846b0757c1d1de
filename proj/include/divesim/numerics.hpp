#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace divesim::num {

using cx = std::complex<double>;

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-11;
  int max_segments = 8000;
};

// Globally adaptive Gauss-Kronrod (G7/K15) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadOptions& opt = {});
cx integrate_cx(const std::function<cx(double)>& f, double a, double b,
                const QuadOptions& opt = {});

// Same, but with user-supplied interior break points (must lie in [a, b]).
double integrate_segmented(const std::function<double(double)>& f, double a,
                           double b, const std::vector<double>& breaks,
                           const QuadOptions& opt = {});
cx integrate_segmented_cx(const std::function<cx(double)>& f, double a,
                          double b, const std::vector<double>& breaks,
                          const QuadOptions& opt = {});

// Bracketed scalar root (Brent). Requires f(a) and f(b) of opposite sign.
// Stops when the bracket is below xtol or |f| <= ftol.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double fa, double fb, double xtol = 1e-14,
                  double ftol = 0.0);
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-14, double ftol = 0.0);

// Scalar minimization on [a, b] (Brent, golden section + parabolic steps).
double brent_minimize(const std::function<double(double)>& f, double a,
                      double b, double xtol = 1e-10,
                      double* fmin = nullptr);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
// Ordinary least squares y = slope*x + intercept. Needs >= 3 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Natural cubic spline through (x_i, y_i); x strictly increasing.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);
  double operator()(double t) const;
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::vector<double> x_, y_, d2_;
};

// Filon panel moments M_k(theta) = int_{-1}^{1} u^k e^{-i theta u} du,
// k = 0, 1, 2. Series evaluation below |theta| = 0.5, closed form above.
void filon_moments(double theta, cx& m0, cx& m1, cx& m2);

// Ramp moments C_k(theta) = int_0^1 xi^k e^{-i theta xi} d xi, k = 0, 1.
void ramp_moments(double theta, cx& c0, cx& c1);

}  // namespace divesim::num
