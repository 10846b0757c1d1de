#include "divesim/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace divesim::diagnostics {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DysonDiagnostics::DysonDiagnostics(Model m, PulseSchedule schedule, double E_a,
                                   const DysonOptions& opts)
    : model_(std::move(m)), schedule_(std::move(schedule)), E_a_(E_a),
      opts_(opts) {
  const auto crit = spectral::critical_energy(model_);
  if (model_.tau != 0.0) {
    if (!(E_a_ > crit.E_c && E_a_ <= schedule_.E_max()))
      throw std::invalid_argument("dyson: need E_c < E_a <= E_m");
    s_c_ = schedule_.crossing_up(crit.E_c);
    s_cp_ = schedule_.crossing_down(crit.E_c);
    s_a_ = schedule_.crossing_up(E_a_);
    c_c_ = std::sqrt(crit.dot_weight_sq);

    win_lo_ = opts_.window_lo_frac * E_a_;
    win_hi_ = opts_.window_hi > 0 ? opts_.window_hi : 4.0 * (E_a_ + 1.0);
    const double r_lo = std::sqrt(0.9 * win_lo_);
    const double r_hi = std::sqrt(1.02 * win_hi_);
    const int n = opts_.spline_nodes;
    std::vector<double> rs(static_cast<size_t>(n) + 1);
    std::vector<double> v0(rs.size()), v1(rs.size()), v2(rs.size());
    for (int i = 0; i <= n; ++i) {
      const double r = r_lo + (r_hi - r_lo) * i / n;
      const double lam = r * r;
      rs[static_cast<size_t>(i)] = r;
      v0[static_cast<size_t>(i)] = model_.measure.principal_value(lam);
      v1[static_cast<size_t>(i)] = model_.measure.principal_value_weighted(
          [](double l) { return 1.0 / l; }, lam);
      v2[static_cast<size_t>(i)] = model_.measure.principal_value_weighted(
          [](double l) { return 1.0 / (l * l); }, lam);
    }
    p0_ = num::CubicSpline(rs, v0);
    p1_ = num::CubicSpline(rs, v1);
    p2_ = num::CubicSpline(std::move(rs), std::move(v2));
    survival_ = std::make_shared<spectral::SurvivalTransform>(model_, E_a_);
  }
}

double DysonDiagnostics::bump(double lam) const {
  const double y = (2.0 * lam - (win_hi_ + win_lo_)) / (win_hi_ - win_lo_);
  if (std::fabs(y) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - y * y));
}

cx DysonDiagnostics::boundary_F(double lam) const {
  const double t2 = model_.tau * model_.tau;
  return cx(E_a_ - lam - t2 * p0_(std::sqrt(lam)),
            -kPi * t2 * model_.measure.mu(lam));
}

double DysonDiagnostics::rho_c(double lam) const {
  const double t2 = model_.tau * model_.tau;
  const double mu = model_.measure.mu(lam);
  const double r = std::sqrt(lam);
  const cx s1 = cx(p1_(r), kPi * mu / lam);
  const cx s2 = cx(p2_(r), kPi * mu / (lam * lam));
  const cx one_plus = 1.0 + t2 * s1;
  const cx val = t2 * s2 + one_plus * one_plus / boundary_F(lam);
  return c_c_ * c_c_ * val.imag() / kPi;
}

double DysonDiagnostics::cross_density(double lam) const {
  const double t2 = model_.tau * model_.tau;
  const double mu = model_.measure.mu(lam);
  const cx s1 = cx(p1_(std::sqrt(lam)), kPi * mu / lam);
  const cx val = (1.0 + t2 * s1) / boundary_F(lam);
  return c_c_ * val.imag() / kPi;
}

DysonTerms DysonDiagnostics::run(double eta) const {
  DysonTerms out;
  if (model_.tau == 0.0) return out;  // all interaction-weighted terms vanish

  const double t_c = s_c_ / eta;
  const double t_a = s_a_ / eta;
  const double t_cp = s_cp_ / eta;
  out.t_span = t_cp - t_c;

  density::DensityView self;
  self.f = [this](double l) {
    const double b = bump(l);
    return b * b * rho_c(l);
  };
  self.support_min = win_lo_;
  self.support_max = win_hi_;
  out.I1 = std::abs(density::fourier(self, out.t_span));

  density::DensityView cross;
  cross.f = [this](double l) { return bump(l) * cross_density(l); };
  cross.support_min = win_lo_;
  cross.support_max = win_hi_;
  auto tx_abs = [&](double t) { return std::abs(density::fourier(cross, t)); };
  auto eps_a = [&](double t) { return E_a_ - schedule_(eta * t); };

  num::QuadOptions qo;
  qo.abs_tol = 1e-12;
  qo.rel_tol = 1e-6;
  qo.max_segments = 400;
  out.I2 = num::integrate(
      [&](double v) { return eps_a(v) * tx_abs(t_cp - v); }, t_c, t_a, qo);
  out.I3 = num::integrate(
      [&](double u) { return eps_a(u) * tx_abs(u - t_c); }, t_a, t_cp, qo);

  // |A(w)| on a mixed linear/log grid, then the double integral collapsed
  // to the lag variable w = v - u
  std::vector<double> wg, av;
  const double w_max = out.t_span;
  for (double w = 0.0; w <= std::min(2.0, w_max); w += 0.25) {
    wg.push_back(w);
    av.push_back(std::abs((*survival_)(w)));
  }
  double w = wg.back();
  while (w < w_max) {
    w = std::min(w * 1.35 + 0.05, w_max);
    wg.push_back(w);
    av.push_back(std::abs((*survival_)(w)));
  }
  auto amp_interp = [&](double x) {
    if (x <= wg.front()) return av.front();
    if (x >= wg.back()) return av.back();
    const auto it = std::upper_bound(wg.begin(), wg.end(), x);
    const size_t hi = static_cast<size_t>(it - wg.begin());
    const double f =
        (x - wg[hi - 1]) / (wg[hi] - wg[hi - 1]);
    return (1.0 - f) * av[hi - 1] + f * av[hi];
  };
  auto inner = [&](double lag) {
    const double u_lo = std::max(t_c, t_a - lag);
    const double u_hi = std::min(t_a, t_cp - lag);
    if (u_hi <= u_lo) return 0.0;
    return num::integrate(
        [&](double u) { return eps_a(u) * eps_a(u + lag); }, u_lo, u_hi, qo);
  };
  out.I4 = num::integrate_segmented(
      [&](double lag) { return amp_interp(lag) * inner(lag); }, 0.0, w_max,
      {std::min(t_a - t_c, t_cp - t_a), std::max(t_a - t_c, t_cp - t_a)}, qo);
  return out;
}

DysonTerms dyson_diagnostics(const Model& m, const PulseSchedule& schedule,
                             double eta, double E_a,
                             const DysonOptions& opts) {
  return DysonDiagnostics(m, schedule, E_a, opts).run(eta);
}

}  // namespace divesim::diagnostics
