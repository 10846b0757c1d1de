#include "divesim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace divesim::spectral {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double feshbach_below(const Model& m, double x, double E) {
  if (x >= 0)
    throw std::domain_error("feshbach_below: x must be negative");
  if (m.tau == 0.0) return E - x;
  return E - x - m.tau * m.tau * m.measure.resolvent_moment(1, x);
}

cx feshbach_boundary(const Model& m, double r, double E) {
  if (r <= 0)
    throw std::domain_error("feshbach_boundary: r must be positive");
  const double lam = r * r;
  if (m.tau == 0.0) return cx(E - lam, 0.0);
  const double t2 = m.tau * m.tau;
  const double re = E - lam - t2 * m.measure.principal_value(lam);
  const double im = -kPi * t2 * m.measure.mu(lam);
  return cx(re, im);
}

CriticalData critical_energy(const Model& m) {
  if (m.tau == 0.0) return {0.0, 1.0};
  const double t2 = m.tau * m.tau;
  const double m1 = m.measure.moment(1, 0.0);
  const double m2 = m.measure.moment(2, 0.0);
  return {t2 * m1, 1.0 / (1.0 + t2 * m2)};
}

namespace {

BoundState root_below(const Model& m, double E, double hi, double f_hi) {
  const double t2 = m.tau * m.tau;
  // F is strictly decreasing; m1 is increasing in the pole position, so
  // lo = min(E, hi) - tau^2 m1(hi) - 1 guarantees F(lo) > 0.
  const double m1_hi = m.measure.resolvent_moment(1, hi);
  double lo = std::min(E, hi) - t2 * m1_hi - 1.0;
  auto f = [&](double x) {
    return E - x - t2 * m.measure.resolvent_moment(1, x);
  };
  double f_lo = f(lo);
  int guard = 0;
  while (f_lo <= 0 && ++guard < 60) {
    lo = 2.0 * lo - std::fabs(E) - 1.0;
    f_lo = f(lo);
  }
  const double lam = num::brent_root(f, lo, hi, f_lo, f_hi, 1e-15, 1e-12);
  const double w = 1.0 / (1.0 + t2 * m.measure.resolvent_moment(2, lam));
  return {E, lam, w};
}

}  // namespace

BoundState bound_state(const Model& m, double E) {
  if (m.tau == 0.0) {
    if (E >= 0)
      throw NoBoundStateError("bound_state: decoupled model needs E < 0");
    return {E, E, 1.0};
  }
  const CriticalData crit = critical_energy(m);
  if (E >= crit.E_c)
    throw NoBoundStateError("bound_state: no discrete eigenvalue for E >= E_c");
  const double hi = -1e-14;
  const double f_hi = feshbach_below(m, hi, E);
  if (f_hi >= 0)
    throw NoBoundStateError("bound_state: root does not lie below threshold");
  return root_below(m, E, hi, f_hi);
}

BoundState cutoff_bound_state(const Model& m, double E) {
  const double delta = m.measure.ir_cutoff_delta();
  if (delta <= 0)
    throw UnsupportedRegimeError(
        "cutoff_bound_state: measure carries no IR cutoff");
  const double gap_top = delta * delta;
  if (E >= gap_top)
    throw UnsupportedRegimeError(
        "cutoff_bound_state: dot energy reaches the essential spectrum");
  if (m.tau == 0.0) return {E, E, 1.0};
  // F(E, E) = -tau^2 m1(E) < 0, so the root lies left of E
  const double t2 = m.tau * m.tau;
  const double f_E = -t2 * m.measure.resolvent_moment(1, E);
  return root_below(m, E, E, f_E);
}

double spectral_density(const Model& m, double E, double lambda) {
  if (lambda <= 0) return 0.0;
  if (m.tau == 0.0) return 0.0;
  if (m.measure.mu(lambda) == 0.0) return 0.0;
  const cx F = feshbach_boundary(m, std::sqrt(lambda), E);
  return m.tau * m.tau * m.measure.mu(lambda) / std::norm(F);
}

double density_sum(const Model& m, double E) {
  if (m.tau == 0.0) return 0.0;
  auto w = [&](double lam) {
    const cx F = feshbach_boundary(m, std::sqrt(lam), E);
    return m.tau * m.tau / std::norm(F);
  };
  return m.measure.integral(w);
}

namespace {

// scan grid for |F(r^2 + i0, E)|: dense near threshold, thinning outward
std::vector<double> boundary_scan_grid(const Model& m, double E) {
  const double r_hi =
      std::sqrt(std::max(4.0 * (std::fabs(E) + 1.0), 4.0 * (E + 1.0)));
  std::vector<double> rs;
  rs.reserve(360);
  for (int i = 1; i <= 240; ++i) rs.push_back(2.0 * i / 240.0);
  for (int i = 1; i <= 120; ++i)
    rs.push_back(2.0 + (r_hi - 2.0) * i / 120.0);
  (void)m;
  return rs;
}

}  // namespace

double resonance_location(const Model& m, double E) {
  auto re_f = [&](double r) { return feshbach_boundary(m, r, E).real(); };
  double prev_r = 1e-9;
  double prev_v = feshbach_boundary(m, prev_r, E).real();
  for (double r : boundary_scan_grid(m, E)) {
    const double v = re_f(r);
    if ((prev_v > 0) != (v > 0))
      return num::brent_root(re_f, prev_r, r, prev_v, v, 1e-13);
    prev_r = r;
    prev_v = v;
  }
  throw std::runtime_error("resonance_location: Re F has no zero in scan range");
}

Assumption3Result assumption3_check(const Model& m, double E_a) {
  auto absF2 = [&](double r) {
    return std::norm(feshbach_boundary(m, r, E_a));
  };
  Assumption3Result res;
  res.infimum = std::numeric_limits<double>::infinity();
  const auto grid = boundary_scan_grid(m, E_a);
  std::vector<double> candidates;
  double prev_r = 1e-9;
  double prev_re = feshbach_boundary(m, prev_r, E_a).real();
  double best_r = prev_r, best_v = absF2(prev_r);
  for (double r : grid) {
    const double v = absF2(r);
    if (v < best_v) {
      best_v = v;
      best_r = r;
    }
    const double re = feshbach_boundary(m, r, E_a).real();
    if ((prev_re > 0) != (re > 0)) candidates.push_back(0.5 * (prev_r + r));
    prev_r = r;
    prev_re = re;
  }
  candidates.push_back(best_r);
  const double dr = grid.size() > 1 ? grid[1] - grid[0] : 0.01;
  for (double rc : candidates) {
    double fmin = 0;
    const double r_star = num::brent_minimize(
        absF2, std::max(1e-10, rc - 2.0 * dr), rc + 2.0 * dr, 1e-12, &fmin);
    if (fmin < res.infimum) {
      res.infimum = fmin;
      res.r_at_min = r_star;
    }
  }
  res.infimum = std::sqrt(std::max(0.0, res.infimum));
  res.holds = res.infimum > 1e-6 * std::max(1.0, std::fabs(E_a));
  return res;
}

SurvivalTransform::SurvivalTransform(Model m, double E_a)
    : model_(std::move(m)), E_a_(E_a) {
  a3_ = assumption3_check(model_, E_a_);
  if (!a3_.holds)
    throw DispersiveAssumptionError(
        "static_survival: boundary Feshbach map vanishes (assumption fails)");
  // P(sqrt(lambda)) is even in r; mirroring kills the natural-spline
  // boundary error at the threshold end
  const double r_max = 13.0;
  const int n = 1300;
  std::vector<double> rs(2 * n + 1), ps(2 * n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = r_max * i / n;
    const double lam = r * r;
    const double v =
        lam <= model_.measure.support_min()
            ? model_.measure.resolvent_moment(
                  1, std::min(lam, model_.measure.support_min() * (1 - 1e-12)))
            : model_.measure.principal_value(lam);
    ps[static_cast<size_t>(n + i)] = v;
    ps[static_cast<size_t>(n - i)] = v;
    rs[static_cast<size_t>(n + i)] = r;
    rs[static_cast<size_t>(n - i)] = -r;
  }
  pv_spline_ = num::CubicSpline(std::move(rs), std::move(ps));
  spline_lambda_max_ = r_max * r_max * 0.995;

  rho_view_.f = [this](double lam) { return density(lam); };
  rho_view_.support_min = model_.measure.support_min();
  rho_view_.tail_amp = model_.tau * model_.tau *
                       std::max(model_.measure.norm_constant(), 1e-30);
  rho_view_.tail_beta = model_.measure.tail_exponent() + 2.0;
  rho_view_.quad_split = model_.measure.lambda_trunc();
  rho_view_.ibp_floor = std::max(30.0, 2.0 * rho_view_.support_min + 1.0);
}

double SurvivalTransform::pv(double lambda) const {
  if (lambda <= spline_lambda_max_) return pv_spline_(std::sqrt(lambda));
  return model_.measure.principal_value(lambda);
}

double SurvivalTransform::density(double lambda) const {
  if (lambda <= 0) return 0.0;
  const double mu = model_.measure.mu(lambda);
  if (mu == 0.0) return 0.0;
  const double t2 = model_.tau * model_.tau;
  const double re = E_a_ - lambda - t2 * pv(lambda);
  const double im = kPi * t2 * mu;
  return t2 * mu / (re * re + im * im);
}

cx SurvivalTransform::operator()(double t) const {
  return density::fourier(rho_view_, t);
}

cx static_survival(const Model& m, double E_a, double t) {
  return SurvivalTransform(m, E_a)(t);
}

RankOneState bound_rank_one(const Model& m, const BoundState& bs) {
  const double c = std::sqrt(bs.dot_weight_sq);
  return {cx(c, 0.0), -m.tau * c, bs.lambda};
}

RankOneState critical_rank_one(const Model& m) {
  const CriticalData crit = critical_energy(m);
  const double c = std::sqrt(crit.dot_weight_sq);
  return {cx(c, 0.0), -m.tau * c, 0.0};
}

namespace {

double pair_moment(const Model& m, double x, double y) {
  auto w = [x, y](double l) { return 1.0 / ((l - x) * (l - y)); };
  return m.measure.integral(w);
}

}  // namespace

cx rank_one_inner(const Model& m, const RankOneState& u, const RankOneState& v) {
  cx acc = std::conj(u.dot_amp) * v.dot_amp;
  if (u.tail_coef != 0.0 && v.tail_coef != 0.0)
    acc += u.tail_coef * v.tail_coef * pair_moment(m, u.tail_pole, v.tail_pole);
  return acc;
}

double rank_one_norm_sq(const Model& m, const RankOneState& u) {
  double acc = std::norm(u.dot_amp);
  if (u.tail_coef != 0.0)
    acc += u.tail_coef * u.tail_coef * pair_moment(m, u.tail_pole, u.tail_pole);
  return acc;
}

double overlap_distance(const Model& m, const RankOneState& u,
                        const RankOneState& v) {
  const double nu = rank_one_norm_sq(m, u);
  const double nv = rank_one_norm_sq(m, v);
  if (std::fabs(nu - 1.0) > 1e-6 || std::fabs(nv - 1.0) > 1e-6)
    throw NormalizationError("overlap_distance: states must be unit-normalized");
  return overlap_to_distance(rank_one_inner(m, u, v));
}

double overlap_to_distance(cx overlap) {
  return std::sqrt(std::max(0.0, 1.0 - std::norm(overlap)));
}

}  // namespace divesim::spectral
