#pragma once

#include "divesim/dynamics.hpp"

namespace divesim::diagnostics {

using dynamics::PulseSchedule;
using num::cx;
using spectral::Model;

struct DysonTerms {
  double I1 = 0;  // smoothed free-propagation overlap across the dive
  double I2 = 0;  // single cross-coupling, first leg
  double I3 = 0;  // single cross-coupling, second leg
  double I4 = 0;  // double dot-dot coupling term
  double t_span = 0;  // (s_c' - s_c)/eta
};

struct DysonOptions {
  double window_lo_frac = 0.2;  // bump support starts at this fraction of E_a
  double window_hi = 0.0;       // 0 -> 4 (E_a + 1)
  int spline_nodes = 700;
};

// Magnitudes of the four Dyson-identity terms that control the dive
// crossing, evaluated against the frozen over-critical Hamiltonian at E_a.
// Diagnostic quantities: smoothed spectral windows, not sharp bounds.
class DysonDiagnostics {
 public:
  DysonDiagnostics(Model m, PulseSchedule schedule, double E_a,
                   const DysonOptions& opts = {});
  DysonTerms run(double eta) const;

 private:
  double bump(double lam) const;
  cx boundary_F(double lam) const;
  double rho_c(double lam) const;
  double cross_density(double lam) const;

  Model model_;
  PulseSchedule schedule_;
  double E_a_;
  DysonOptions opts_;
  double win_lo_ = 0, win_hi_ = 0;
  double s_c_ = 0, s_cp_ = 0, s_a_ = 0;
  double c_c_ = 1;
  num::CubicSpline p0_, p1_, p2_;  // principal values of mu/l^k around the window
  std::shared_ptr<spectral::SurvivalTransform> survival_;
};

DysonTerms dyson_diagnostics(const Model& m, const PulseSchedule& schedule,
                             double eta, double E_a,
                             const DysonOptions& opts = {});

}  // namespace divesim::diagnostics
