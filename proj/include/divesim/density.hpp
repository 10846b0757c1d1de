#pragma once

#include <functional>
#include <limits>

#include "divesim/numerics.hpp"

namespace divesim::density {

using num::cx;

// A nonnegative density f(lambda) on [support_min, inf) with a power-law
// tail f ~ tail_amp * lambda^{-tail_beta}, or on a compact interval
// [support_min, support_max] when support_max is finite.
struct DensityView {
  std::function<double(double)> f;
  double support_min = 0.0;
  double support_max = std::numeric_limits<double>::infinity();
  double tail_amp = 0.0;
  double tail_beta = 0.0;
  // quadrature domain split: [support_min, quad_split] handled directly,
  // (quad_split, inf) via an inverse-square map
  double quad_split = 100.0;
  // smallest admissible oscillatory/tail handover energy
  double ibp_floor = 10.0;

  bool compact() const { return std::isfinite(support_max); }
};

struct OscOptions {
  double tol = 5e-13;       // target for the non-oscillatory region
  double tail_tol = 1e-13;  // target for the truncated tail remainder
  double cap_frac = 0.25;   // panel phase cap: width <= cap_frac*pi/|t|
  double panel_frac = 0.04; // smoothness-driven panel growth fraction
};

// int f(lambda) w(lambda) dlambda over the support (w may be null).
double integral(const DensityView& d,
                const std::function<double(double)>& w = nullptr,
                const num::QuadOptions& opt = {});

// Cauchy principal value  P.V. int f(lambda)/(lambda - x) dlambda  for x in
// the interior of the direct quadrature domain; regular integral otherwise.
double principal_value(const DensityView& d, double x,
                       const num::QuadOptions& opt = {});

// int f(lambda) e^{-i lambda t} dlambda. Exact conjugate symmetry in t.
cx fourier(const DensityView& d, double t, const OscOptions& opt = {});

}  // namespace divesim::density
