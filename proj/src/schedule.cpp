#include "divesim/schedule.hpp"

#include <cmath>

#include "divesim/numerics.hpp"

namespace divesim::dynamics {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PulseSchedule PulseSchedule::sin_sq(double E_lo, double E_m) {
  if (!(E_lo < 0.0) || !(E_m > 0.0))
    throw std::invalid_argument("sin_sq: need E_lo < 0 < E_m");
  PulseSchedule p;
  p.E_lo_ = E_lo;
  p.E_m_ = E_m;
  p.s_m_ = -0.5;
  const double amp = E_m - E_lo;
  p.E_ = [E_lo, amp](double s) {
    const double u = std::sin(kPi * (s + 1.0));
    return E_lo + amp * u * u;
  };
  p.dE_ = [amp](double s) { return amp * kPi * std::sin(2.0 * kPi * (s + 1.0)); };
  return p;
}

double PulseSchedule::crossing_up(double value) const {
  if (value <= E_lo_ || value >= E_m_)
    throw std::invalid_argument("crossing_up: value outside (E_lo, E_m)");
  auto f = [&](double s) { return E_(s) - value; };
  return num::brent_root(f, -1.0, s_m_, 1e-13);
}

double PulseSchedule::crossing_down(double value) const {
  if (value <= E_lo_ || value >= E_m_)
    throw std::invalid_argument("crossing_down: value outside (E_lo, E_m)");
  auto f = [&](double s) { return E_(s) - value; };
  return num::brent_root(f, s_m_, 0.0, 1e-13);
}

PulseSchedule PulseSchedule::reversed() const {
  PulseSchedule p;
  p.E_lo_ = E_lo_;
  p.E_m_ = E_m_;
  p.s_m_ = -1.0 - s_m_;
  auto E = E_;
  auto dE = dE_;
  p.E_ = [E](double s) { return E(-1.0 - s); };
  p.dE_ = [dE](double s) { return -dE(-1.0 - s); };
  return p;
}

}  // namespace divesim::dynamics
