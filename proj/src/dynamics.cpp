#include "divesim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace divesim::dynamics {

InitialState InitialState::bound(const Model& m, const BoundState& bs) {
  const double c = std::sqrt(bs.dot_weight_sq);
  return {cx(c, 0.0), -m.tau * c, bs.lambda};
}

InitialState InitialState::critical(const Model& m) {
  const auto crit = spectral::critical_energy(m);
  const double c = std::sqrt(crit.dot_weight_sq);
  return {cx(c, 0.0), -m.tau * c, 0.0};
}

InitialState InitialState::pure_dot() { return {cx(1.0, 0.0), 0.0, 0.0}; }

namespace {

// product-panel coefficients over [j dt, (j+1) dt] for the convolution of a
// kernel g against the linear interpolant of the amplitude:
//   int g(u) a(t - u) du ~ sum_j  A_j a_{n-j} + B_j a_{n-j-1}.
// The j = 0 panel is integrated exactly (the kernel has a weak power kink at
// lag zero); the smooth panels use Simpson with half-lag samples.
void panel_coefficients(const std::function<cx(double)>& g, double dt,
                        int n_steps, std::vector<cx>& half,
                        std::vector<cx>& a_coef, std::vector<cx>& b_coef) {
  half.resize(static_cast<size_t>(2 * n_steps) + 1);
  for (int j = 0; j <= 2 * n_steps; ++j)
    half[static_cast<size_t>(j)] = g(0.5 * dt * j);
  a_coef.assign(static_cast<size_t>(n_steps), cx{});
  b_coef.assign(static_cast<size_t>(n_steps), cx{});
  num::QuadOptions qo;
  qo.abs_tol = 1e-12;
  a_coef[0] = num::integrate_cx(
      [&](double u) { return g(u) * (1.0 - u / dt); }, 0.0, dt, qo);
  b_coef[0] = num::integrate_cx(
      [&](double u) { return g(u) * (u / dt); }, 0.0, dt, qo);
  for (int j = 1; j < n_steps; ++j) {
    const cx g0 = half[static_cast<size_t>(2 * j)];
    const cx gm = half[static_cast<size_t>(2 * j + 1)];
    const cx g1 = half[static_cast<size_t>(2 * j + 2)];
    a_coef[static_cast<size_t>(j)] = dt * (g0 + 2.0 * gm) / 6.0;
    b_coef[static_cast<size_t>(j)] = dt * (2.0 * gm + g1) / 6.0;
  }
}

}  // namespace

KernelWorkspace::KernelWorkspace(const Model& m, double dt, int n_steps,
                                 const std::vector<double>& poles)
    : dt_(dt), n_steps_(n_steps) {
  std::vector<cx> half;
  panel_coefficients([&](double u) { return m.measure.kernel_K(u); }, dt,
                     n_steps, half, ka_, kb_);
  for (double pole : poles) {
    if (std::any_of(poles_.begin(), poles_.end(),
                    [pole](const PoleTables& p) { return p.pole == pole; }))
      continue;
    PoleTables pt;
    pt.pole = pole;
    std::vector<cx> hhalf;
    panel_coefficients([&](double u) { return m.measure.driving_h(u, pole); },
                       dt, n_steps, hhalf, pt.a, pt.b);
    pt.full.resize(static_cast<size_t>(n_steps) + 1);
    for (int j = 0; j <= n_steps; ++j)
      pt.full[static_cast<size_t>(j)] = hhalf[static_cast<size_t>(2 * j)];
    poles_.push_back(std::move(pt));
  }
}

bool KernelWorkspace::covers(double dt, int n_steps,
                             const std::vector<double>& poles) const {
  if (std::fabs(dt - dt_) > 1e-13 * std::max(1.0, dt_)) return false;
  if (n_steps > n_steps_) return false;
  for (double p : poles)
    if (std::none_of(poles_.begin(), poles_.end(),
                     [p](const PoleTables& t) { return t.pole == p; }))
      return false;
  return true;
}

const KernelWorkspace::PoleTables& KernelWorkspace::find(double pole) const {
  for (const auto& p : poles_)
    if (p.pole == pole) return p;
  throw ProbeError("kernel workspace: missing pole table");
}

const std::vector<cx>& KernelWorkspace::h_full(double pole) const {
  return find(pole).full;
}
const std::vector<cx>& KernelWorkspace::ha(double pole) const {
  return find(pole).a;
}
const std::vector<cx>& KernelWorkspace::hb(double pole) const {
  return find(pole).b;
}

namespace {

struct ProbeTarget {
  Probe kind;
  std::string label;
  double pole = 0.0;
  double c1 = 1.0;
};

AdiabaticRun evolve_core(const Model& m,
                         const std::function<double(double)>& energy_of_t,
                         double t0, double t1, const InitialState& initial,
                         const std::vector<ProbeTarget>& probes,
                         const RunOptions& opts, double eta, double s_start,
                         double s_end) {
  AdiabaticRun run;
  run.eta = eta;
  run.s_start = s_start;
  run.s_end = s_end;
  run.t_start = t0;
  run.initial = initial;

  double e_scale = 1.0;
  for (double t : {t0, 0.5 * (t0 + t1), t1})
    e_scale = std::max(e_scale, std::fabs(energy_of_t(t)));
  double dt = opts.dt > 0 ? opts.dt : std::min(0.02, 0.1 / e_scale);
  const double span = t1 - t0;
  if (span <= 0) throw std::invalid_argument("evolve: empty time interval");
  const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
  dt = span / n;
  run.dt = dt;

  const double tau = m.tau;
  const double t2 = tau * tau;

  std::vector<double> need_poles;
  if (initial.tail_coef != cx{}) need_poles.push_back(initial.tail_pole);
  for (const auto& p : probes)
    if (p.kind != Probe::Amplitude) need_poles.push_back(p.pole);

  std::shared_ptr<const KernelWorkspace> ws = opts.kernels;
  if (tau != 0.0 && (!ws || !ws->covers(dt, n, need_poles)))
    ws = std::make_shared<KernelWorkspace>(m, dt, n, need_poles);

  std::vector<cx>& a = run.amplitude;
  a.assign(static_cast<size_t>(n) + 1, cx{});
  a[0] = initial.amp;

  const std::vector<cx>* h0 = nullptr;
  if (tau != 0.0 && initial.tail_coef != cx{})
    h0 = &ws->h_full(initial.tail_pole);

  // Integrating-factor stepping: a = e^{-i theta} b with theta' = E(eta t),
  // so the bare level phase is exact and the decoupled limit is trivial.
  // b' = e^{i theta} (D - tau^2 M), D the bound-tail driving, M the memory.
  const double amp_cap = 1.0 + opts.contractivity_tol;
  auto driving = [&](int idx) {
    if (!h0) return cx{};
    return cx(0.0, -tau) * initial.tail_coef * (*h0)[static_cast<size_t>(idx)];
  };
  double theta = 0.0;
  cx b = initial.amp;
  cx mem{};  // memory integral at the current grid point
  for (int step = 0; step < n; ++step) {
    const double t_n = t0 + dt * step;
    const cx rot_n = std::polar(1.0, theta);
    const cx gb_n = rot_n * (driving(step) - t2 * mem);
    cx hist{};
    if (tau != 0.0) {
      const auto& ka = ws->ka();
      const auto& kb = ws->kb();
      hist = kb[0] * a[static_cast<size_t>(step)];
      for (int j = 1; j <= step; ++j)
        hist += ka[static_cast<size_t>(j)] * a[static_cast<size_t>(step + 1 - j)] +
                kb[static_cast<size_t>(j)] * a[static_cast<size_t>(step - j)];
    }
    const cx a0 = tau != 0.0 ? ws->ka()[0] : cx{};
    // Simpson increment of the accumulated phase
    theta += dt / 6.0 *
             (energy_of_t(t_n) + 4.0 * energy_of_t(t_n + 0.5 * dt) +
              energy_of_t(t_n + dt));
    const cx rot_n1 = std::polar(1.0, theta);
    const cx b_pred = b + dt * gb_n;
    const cx a_pred = std::conj(rot_n1) * b_pred;
    const cx gb_pred =
        rot_n1 * (driving(step + 1) - t2 * (a0 * a_pred + hist));
    b += 0.5 * dt * (gb_n + gb_pred);
    const cx next = std::conj(rot_n1) * b;
    a[static_cast<size_t>(step + 1)] = next;
    mem = a0 * next + hist;
    if (std::abs(next) > amp_cap)
      throw IntegratorError("evolve: amplitude escaped the unit ball",
                            t0 + dt * (step + 1), std::abs(next));
  }

  for (const auto& p : probes) {
    if (p.kind == Probe::Amplitude) {
      run.overlaps[p.label] = a.back();
      continue;
    }
    cx ov = p.c1 * a.back();
    if (tau != 0.0) {
      if (initial.tail_coef != cx{})
        ov -= tau * p.c1 * initial.tail_coef *
              m.measure.driving_h2(span, initial.tail_pole, p.pole);
      const auto& ha = ws->ha(p.pole);
      const auto& hb = ws->hb(p.pole);
      cx conv{};
      for (int j = 0; j < n; ++j)
        conv += ha[static_cast<size_t>(j)] * a[static_cast<size_t>(n - j)] +
                hb[static_cast<size_t>(j)] * a[static_cast<size_t>(n - j - 1)];
      ov += cx(0.0, t2) * p.c1 * conv;
    }
    run.overlaps[p.label] = ov;
  }
  return run;
}

std::vector<ProbeTarget> resolve_probes(const Model& m,
                                        const std::vector<Probe>& probes,
                                        double e_end) {
  std::vector<ProbeTarget> out;
  for (Probe p : probes) {
    ProbeTarget t;
    t.kind = p;
    switch (p) {
      case Probe::Amplitude:
        t.label = "amp";
        break;
      case Probe::Critical: {
        t.label = "critical";
        const auto crit = spectral::critical_energy(m);
        t.pole = 0.0;
        t.c1 = std::sqrt(crit.dot_weight_sq);
        break;
      }
      case Probe::FinalBound: {
        t.label = "final";
        const auto bs = m.measure.ir_cutoff_delta() > 0
                            ? spectral::cutoff_bound_state(m, e_end)
                            : spectral::bound_state(m, e_end);
        t.pole = bs.lambda;
        t.c1 = std::sqrt(bs.dot_weight_sq);
        break;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

AdiabaticRun evolve(const Model& m, const PulseSchedule& schedule, double eta,
                    double s_start, double s_end, const InitialState& initial,
                    const std::vector<Probe>& probes, const RunOptions& opts) {
  if (eta <= 0) throw std::invalid_argument("evolve: eta must be positive");
  if (!(s_start < s_end))
    throw std::invalid_argument("evolve: need s_start < s_end");
  auto energy = [&schedule, eta](double t) { return schedule(eta * t); };
  const auto targets = resolve_probes(m, probes, schedule(s_end));
  return evolve_core(m, energy, s_start / eta, s_end / eta, initial, targets,
                     opts, eta, s_start, s_end);
}

AdiabaticRun evolve_frozen(const Model& m, double E_a, double duration,
                           const InitialState& initial,
                           const std::vector<Probe>& probes,
                           const RunOptions& opts) {
  auto energy = [E_a](double) { return E_a; };
  const auto targets = resolve_probes(m, probes, E_a);
  return evolve_core(m, energy, 0.0, duration, initial, targets, opts, 0.0,
                     0.0, 0.0);
}

double survival_probability(const AdiabaticRun& run, const std::string& probe) {
  auto it = run.overlaps.find(probe);
  if (it == run.overlaps.end())
    throw ProbeError("survival_probability: probe '" + probe +
                     "' was not recorded");
  return std::clamp(std::norm(it->second), 0.0, 1.0);
}

double threshold_distance(const AdiabaticRun& run) {
  auto it = run.overlaps.find("critical");
  if (it == run.overlaps.end())
    throw ProbeError("threshold_distance: critical probe missing");
  return spectral::overlap_to_distance(it->second);
}

MicroscopicResult microscopic_survival(const Model& m,
                                       const PulseSchedule& schedule,
                                       double eta, double alpha,
                                       const RunOptions& opts) {
  if (alpha <= 0) throw std::invalid_argument("microscopic_survival: alpha > 0");
  MicroscopicResult res;
  const int nu = m.measure.ir_order();
  const double q = 4.0 / (2.0 * nu + 7.0);
  res.s_window = alpha * std::pow(eta, q);
  res.eta0_alpha = std::pow(alpha, 2.0 * (2.0 * nu + 7.0));
  res.within_lemma_regime = eta < res.eta0_alpha;
  const auto crit = spectral::critical_energy(m);
  const double s_c = schedule.crossing_up(crit.E_c);
  double s_end = s_c + res.s_window;
  if (s_end >= schedule.s_max())
    throw std::invalid_argument(
        "microscopic_survival: window reaches the pulse maximum");
  const auto run = evolve(m, schedule, eta, s_c, s_end,
                          InitialState::critical(m), {Probe::Critical}, opts);
  res.survival = survival_probability(run, "critical");
  res.loss = 1.0 - res.survival;
  return res;
}

}  // namespace divesim::dynamics
