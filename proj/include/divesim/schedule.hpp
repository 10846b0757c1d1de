#pragma once

#include <functional>
#include <stdexcept>

namespace divesim::dynamics {

// Dot-energy pulse E(s) on [-1, 0]: strictly increasing up to the interior
// maximum s_m, strictly decreasing after, with E(-1) = E(0) < 0 < E(s_m).
class PulseSchedule {
 public:
  // E(s) = E_lo + (E_m - E_lo) sin^2(pi (s + 1)), s_m = -1/2.
  static PulseSchedule sin_sq(double E_lo, double E_m);

  double operator()(double s) const { return E_(s); }
  double derivative(double s) const { return dE_(s); }

  double E_lo() const { return E_lo_; }
  double E_max() const { return E_m_; }
  double s_max() const { return s_m_; }

  // crossing E(s) = value on the rising branch [-1, s_m]
  double crossing_up(double value) const;
  // crossing E(s) = value on the falling branch [s_m, 0]
  double crossing_down(double value) const;

  // pulse run backwards in macroscopic time: s -> E(-1 - s)
  PulseSchedule reversed() const;

 private:
  PulseSchedule() = default;
  std::function<double(double)> E_, dE_;
  double E_lo_ = -1.0, E_m_ = 0.5, s_m_ = -0.5;
};

}  // namespace divesim::dynamics
