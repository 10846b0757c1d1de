#include "divesim/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace divesim::density {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Direct part in the r = sqrt(lambda) variable: the threshold factor
// lambda^{nu+1/2} becomes polynomial there.
double direct_part(const DensityView& d, const std::function<double(double)>& w,
                   double upper, const num::QuadOptions& opt) {
  const double r_lo = std::sqrt(std::max(0.0, d.support_min));
  const double r_hi = std::sqrt(upper);
  if (r_hi <= r_lo) return 0.0;
  auto g = [&](double r) {
    const double lam = r * r;
    const double base = 2.0 * r * d.f(lam);
    return w ? base * w(lam) : base;
  };
  std::vector<double> breaks;
  for (double b : {0.01, 0.1, 1.0, 3.0})
    if (b > r_lo && b < r_hi) breaks.push_back(b);
  return num::integrate_segmented(g, r_lo, r_hi, breaks, opt);
}

// Tail part over (split, inf) mapped by lambda = split / v^2, v in (0, 1].
double tail_part(const DensityView& d, const std::function<double(double)>& w,
                 double split, const num::QuadOptions& opt) {
  if (d.compact()) return 0.0;
  auto g = [&](double v) {
    const double lam = split / (v * v);
    const double base = 2.0 * split / (v * v * v) * d.f(lam);
    return w ? base * w(lam) : base;
  };
  return num::integrate(g, 0.0, 1.0, opt);
}

}  // namespace

double integral(const DensityView& d, const std::function<double(double)>& w,
                const num::QuadOptions& opt) {
  const double split = d.compact() ? d.support_max : d.quad_split;
  return direct_part(d, w, split, opt) + tail_part(d, w, split, opt);
}

namespace {

// subtraction on [a, b] around the interior pole x:
//   int (f(l)-f(x))/(l-x) dl + f(x) ln((b-x)/(x-a))
double pv_subtracted(const DensityView& d, double x, double a, double b,
                     const num::QuadOptions& opt) {
  const double fx = d.f(x);
  auto g = [&](double lam) {
    const double dl = lam - x;
    if (std::fabs(dl) < 1e-300) return 0.0;
    return (d.f(lam) - fx) / dl;
  };
  std::vector<double> breaks = {0.5 * (a + x), x, 0.5 * (x + b)};
  const double core = num::integrate_segmented(g, a, b, breaks, opt);
  return core + fx * std::log((b - x) / (x - a));
}

}  // namespace

double principal_value(const DensityView& d, double x,
                       const num::QuadOptions& opt) {
  const double lo = d.support_min;
  const double split = d.compact() ? d.support_max : d.quad_split;
  auto weight = [x](double lam) { return 1.0 / (lam - x); };
  if (x <= lo || (d.compact() && x >= split))
    return direct_part(d, weight, split, opt) + tail_part(d, weight, split, opt);
  if (x < split)
    return pv_subtracted(d, x, lo, split, opt) +
           tail_part(d, weight, split, opt);
  // pole inside the mapped tail: pull a window [x/2, 2x] out of it
  double acc = direct_part(d, weight, split, opt);
  auto g = [&](double v) {  // (split, x/2) via lambda = split / v^2
    const double lam = split / (v * v);
    return 2.0 * split / (v * v * v) * d.f(lam) * weight(lam);
  };
  acc += num::integrate(g, std::sqrt(2.0 * split / x), 1.0, opt);
  acc += pv_subtracted(d, x, 0.5 * x, 2.0 * x, opt);
  DensityView far = d;
  far.quad_split = 2.0 * x;
  acc += tail_part(far, weight, 2.0 * x, opt);
  return acc;
}

namespace {

// Panel-wise Filon rule on [a, b]: quadratic interpolation of f against the
// exact integral of e^{-i lambda t}. Panel widths obey both the phase cap
// cap_frac*pi/t and a growth-fraction limit tracking the density's own scale.
cx filon_sweep(const std::function<double(double)>& f, double a, double b,
               double t, const OscOptions& opt) {
  if (b <= a) return {};
  const double cap = opt.cap_frac * kPi / t;
  cx acc{};
  double left = a;
  double f_left = f(left);
  while (left < b) {
    double w = std::min(cap, opt.panel_frac * (0.2 + left));
    double right = left + w;
    if (right >= b - 1e-12 * b) right = b;
    const double mid = 0.5 * (left + right);
    const double h = 0.5 * (right - left);
    const double f_mid = f(mid);
    const double f_right = f(right);
    cx m0, m1, m2;
    num::filon_moments(h * t, m0, m1, m2);
    const double c1 = 0.5 * (f_right - f_left);
    const double c2 = 0.5 * (f_right - 2.0 * f_mid + f_left);
    const cx phase = std::exp(cx(0.0, -mid * t));
    acc += h * phase * (f_mid * m0 + c1 * m1 + c2 * m2);
    left = right;
    f_left = f_right;
  }
  return acc;
}

// Truncated-tail correction by repeated integration by parts,
//   int_L^inf f e^{-i l t} dl = e^{-iLt} sum_j f^(j)(L) / (it)^{j+1} + R_4,
// with derivatives from five-point central differences.
cx ibp_tail(const std::function<double(double)>& f, double L, double t) {
  const double h = 0.02 * L;
  const double fm2 = f(L - 2 * h), fm1 = f(L - h), f0 = f(L),
               fp1 = f(L + h), fp2 = f(L + 2 * h);
  const double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
  const double d2 =
      (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
  const double d3 = (-fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2) / (2.0 * h * h * h);
  const cx it = cx(0.0, t);
  cx sum = f0 / it + d1 / (it * it) + d2 / (it * it * it) +
           d3 / (it * it * it * it);
  return std::exp(cx(0.0, -L * t)) * sum;
}

// Handover energy: beyond it the 4-term IBP remainder is below tail_tol.
double tail_split(const DensityView& d, double t, const OscOptions& opt) {
  const double beta = std::max(1.5, d.tail_beta);
  const double amp = std::max(d.tail_amp, 1e-30);
  // |R_4| <= amp * (beta)_4 * L^{-(beta+3)} / ((beta+3) t^4)
  const double poch = beta * (beta + 1.0) * (beta + 2.0) * (beta + 3.0);
  const double num_ = amp * poch / ((beta + 3.0) * opt.tail_tol);
  double L = std::pow(num_ / (t * t * t * t), 1.0 / (beta + 3.0));
  L = std::clamp(L, d.ibp_floor, 1e9);
  return std::max(L, 2.0 * d.support_min + 1.0);
}

}  // namespace

cx fourier(const DensityView& d, double t, const OscOptions& opt) {
  if (t == 0.0) return cx(integral(d), 0.0);
  if (t < 0.0) return std::conj(fourier(d, -t, opt));

  const double upper =
      d.compact() ? d.support_max : tail_split(d, t, opt);
  const double cap_energy = opt.cap_frac * kPi / t;
  const double slow_hi = std::min(cap_energy, upper);

  // slow-phase region in the r variable (handles the threshold kink and any
  // resolvent peak adaptively; phase stays under the cap by construction)
  cx acc{};
  const double r_lo = std::sqrt(std::max(0.0, d.support_min));
  if (slow_hi > d.support_min) {
    const double r_hi = std::sqrt(slow_hi);
    auto g = [&](double r) {
      const double lam = r * r;
      return 2.0 * r * d.f(lam) * std::exp(cx(0.0, -lam * t));
    };
    std::vector<double> breaks;
    for (double b : {0.003, 0.03, 0.3, 1.0, 3.0, 10.0, 100.0})
      if (b > r_lo && b < r_hi) breaks.push_back(b);
    num::QuadOptions qo;
    qo.abs_tol = opt.tol;
    qo.rel_tol = 1e-12;
    acc += num::integrate_segmented_cx(g, r_lo, r_hi, breaks, qo);
  }

  // never straddle the support edge, and sample just above it: a gapped
  // density is zero at the edge itself by convention
  const double edge = d.support_min > 0 ? d.support_min * (1.0 + 1e-12)
                                        : d.support_min;
  const double filon_lo = std::max(slow_hi, edge);
  if (filon_lo < upper) acc += filon_sweep(d.f, filon_lo, upper, t, opt);
  if (!d.compact()) acc += ibp_tail(d.f, upper, t);
  return acc;
}

}  // namespace divesim::density
