#include "divesim/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace divesim::oracle {

namespace {

struct DiscreteModel {
  std::vector<double> lambda;
  std::vector<double> g;  // dot couplings tau*sqrt(w mu)
};

DiscreteModel build_modes(const Model& m, int n_modes) {
  DiscreteModel d;
  const auto nodes = m.measure.discretize(n_modes);
  d.lambda.reserve(nodes.size());
  d.g.reserve(nodes.size());
  for (const auto& nd : nodes) {
    d.lambda.push_back(nd.lambda);
    const double wmu = std::max(0.0, nd.weight * m.measure.mu(nd.lambda));
    d.g.push_back(m.tau * std::sqrt(wmu));
  }
  return d;
}

struct DiscreteState {
  std::vector<cx> bath;
  cx dot{};

  double norm_sq() const {
    double acc = std::norm(dot);
    for (const auto& v : bath) acc += std::norm(v);
    return acc;
  }
};

// rank-one data (tail_coef * r0(pole) phi ; amp) projected on the modes
DiscreteState project_state(const DiscreteModel& d, const Model& m,
                            const InitialState& s) {
  DiscreteState st;
  st.bath.assign(d.lambda.size(), cx{});
  st.dot = s.amp;
  if (s.tail_coef != cx{}) {
    for (size_t j = 0; j < d.lambda.size(); ++j) {
      const double phi_j = d.g[j] / std::max(m.tau, 1e-300);
      st.bath[j] = s.tail_coef * phi_j / (d.lambda[j] - s.tail_pole);
    }
  }
  const double nrm = std::sqrt(st.norm_sq());
  if (nrm <= 0) throw std::invalid_argument("oracle: null initial state");
  st.dot /= nrm;
  for (auto& v : st.bath) v /= nrm;
  return st;
}

struct ProbeVec {
  std::string label;
  DiscreteState vec;
  bool raw_amp = false;
};

// Split-step propagator: the Hamiltonian is the sum of the diagonal part
// D = diag(lambda_j; E(t)) and the rank-two coupling V between the dot and
// the unit vector along g. Both exponentials are applied exactly, so every
// step is unitary and the state norm is conserved to roundoff. Strang
// steps S(h) = D(h/2) V(h) D(h/2) are composed into a fourth-order Yoshida
// triple; a plain Strang shadow step supplies the error estimate.
class SplitStepper {
 public:
  SplitStepper(const DiscreteModel& d, const DiscreteState& st0,
               std::function<double(double)> energy)
      : d_(d), energy_(std::move(energy)), psi_(st0.bath), a_(st0.dot) {
    const size_t nm = d_.lambda.size();
    g_norm_ = 0.0;
    for (double g : d_.g) g_norm_ += g * g;
    g_norm_ = std::sqrt(g_norm_);
    unit_g_.resize(nm);
    for (size_t j = 0; j < nm; ++j)
      unit_g_[j] = g_norm_ > 0 ? d_.g[j] / g_norm_ : 0.0;
  }

  void set_substep(double h) {
    h_ = h;
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;
    d_edge_ = 0.5 * w1 * h;
    d_mid_ = 0.5 * (w1 + w0) * h;
    v_out_ = w1 * h;
    v_in_ = w0 * h;
    const size_t nm = d_.lambda.size();
    rot_edge_.resize(nm);
    rot_mid_.resize(nm);
    rot_half_.resize(nm);
    for (size_t j = 0; j < nm; ++j) {
      rot_edge_[j] = std::polar(1.0, -d_.lambda[j] * d_edge_);
      rot_mid_[j] = std::polar(1.0, -d_.lambda[j] * d_mid_);
      rot_half_[j] = std::polar(1.0, -d_.lambda[j] * 0.5 * h);
    }
  }

  // one fourth-order substep starting at absolute time t
  void advance(double t) {
    diag_kick(rot_edge_, d_edge_, t);
    coupling_kick(v_out_);
    diag_kick(rot_mid_, d_mid_, t + d_edge_);
    coupling_kick(v_in_);
    diag_kick(rot_mid_, d_mid_, t + d_edge_ + d_mid_);
    coupling_kick(v_out_);
    diag_kick(rot_edge_, d_edge_, t + h_ - d_edge_);
  }

  // second-order Strang version of the same substep (shadow for control)
  void advance_strang(double t) {
    diag_kick(rot_half_, 0.5 * h_, t);
    coupling_kick(h_);
    diag_kick(rot_half_, 0.5 * h_, t + 0.5 * h_);
  }

  double norm() const {
    double acc = std::norm(a_);
    for (const auto& v : psi_) acc += std::norm(v);
    return std::sqrt(acc);
  }

  cx dot() const { return a_; }
  const std::vector<cx>& bath() const { return psi_; }

  void save(std::vector<cx>& psi, cx& a) const {
    psi = psi_;
    a = a_;
  }
  void restore(const std::vector<cx>& psi, cx a) {
    psi_ = psi;
    a_ = a;
  }

 private:
  void diag_kick(const std::vector<cx>& rot, double dur, double t_lo) {
    const size_t nm = d_.lambda.size();
    for (size_t j = 0; j < nm; ++j) psi_[j] *= rot[j];
    const double e_mid = energy_(t_lo + 0.5 * dur);
    a_ *= std::polar(1.0, -e_mid * dur);
  }

  void coupling_kick(double dur) {
    if (g_norm_ == 0.0) return;
    cx beta{};
    const size_t nm = d_.lambda.size();
    for (size_t j = 0; j < nm; ++j) beta += unit_g_[j] * psi_[j];
    const double c = std::cos(g_norm_ * dur);
    const double s = std::sin(g_norm_ * dur);
    const cx beta_new = c * beta + cx(0.0, -s) * a_;
    const cx a_new = c * a_ + cx(0.0, -s) * beta;
    const cx dbeta = beta_new - beta;
    for (size_t j = 0; j < nm; ++j) psi_[j] += dbeta * unit_g_[j];
    a_ = a_new;
  }

  const DiscreteModel& d_;
  std::function<double(double)> energy_;
  std::vector<cx> psi_, rot_edge_, rot_mid_, rot_half_;
  std::vector<double> unit_g_;
  cx a_{};
  double g_norm_ = 0.0;
  double h_ = 0.0;
  double d_edge_ = 0, d_mid_ = 0, v_out_ = 0, v_in_ = 0;
};

AdiabaticRun run_oracle(const std::function<double(double)>& energy, double t0,
                        double t1, const InitialState& initial,
                        const std::vector<ProbeVec>& probes,
                        const DiscreteModel& d, const DiscreteState& st0,
                        const OracleOptions& opts, double eta, double s_start,
                        double s_end) {
  AdiabaticRun run;
  run.eta = eta;
  run.s_start = s_start;
  run.s_end = s_end;
  run.t_start = t0;
  run.initial = initial;

  double e_scale = 1.0;
  for (double t : {t0, 0.5 * (t0 + t1), t1})
    e_scale = std::max(e_scale, std::fabs(energy(t)));
  double dt = opts.dt_record > 0 ? opts.dt_record : std::min(0.02, 0.1 / e_scale);
  const double span = t1 - t0;
  const int n = std::max(1, static_cast<int>(std::ceil(span / dt - 1e-9)));
  dt = span / n;
  run.dt = dt;

  SplitStepper stepper(d, st0, energy);
  run.amplitude.assign(static_cast<size_t>(n) + 1, cx{});
  run.amplitude[0] = st0.dot;
  const double norm0 = stepper.norm();
  double max_drift = 0.0;

  int substeps = std::max(1, static_cast<int>(std::ceil(dt / opts.substep)));
  std::vector<cx> psi_save;
  cx a_save;

  for (int step = 0; step < n; ++step) {
    const double t_macro = t0 + dt * step;
    for (int attempt = 0; attempt < 9; ++attempt) {
      const double h = dt / substeps;
      stepper.set_substep(h);
      // embedded control: Strang shadow of the first substep
      stepper.save(psi_save, a_save);
      stepper.advance_strang(t_macro);
      const cx a_low = stepper.dot();
      stepper.restore(psi_save, a_save);
      stepper.advance(t_macro);
      const double est = std::abs(stepper.dot() - a_low) * substeps;
      if (est <= opts.step_tol || substeps >= 4096) {
        for (int ss = 1; ss < substeps; ++ss)
          stepper.advance(t_macro + h * ss);
        break;
      }
      stepper.restore(psi_save, a_save);
      substeps *= 2;
    }
    max_drift = std::max(max_drift, std::fabs(stepper.norm() - norm0));
    run.amplitude[static_cast<size_t>(step + 1)] = stepper.dot();
  }
  run.norm_drift = max_drift;

  const auto& bath = stepper.bath();
  for (const auto& pv : probes) {
    if (pv.raw_amp) {
      run.overlaps[pv.label] = stepper.dot();
      continue;
    }
    cx ov = std::conj(pv.vec.dot) * stepper.dot();
    for (size_t j = 0; j < bath.size(); ++j)
      ov += std::conj(pv.vec.bath[j]) * bath[j];
    run.overlaps[pv.label] = ov;
  }
  return run;
}

std::vector<ProbeVec> resolve_oracle_probes(const Model& m,
                                            const DiscreteModel& d,
                                            const std::vector<Probe>& probes,
                                            double e_end) {
  std::vector<ProbeVec> out;
  for (Probe p : probes) {
    ProbeVec pv;
    switch (p) {
      case Probe::Amplitude:
        pv.label = "amp";
        pv.raw_amp = true;
        break;
      case Probe::Critical: {
        pv.label = "critical";
        pv.vec = project_state(d, m, InitialState::critical(m));
        break;
      }
      case Probe::FinalBound: {
        pv.label = "final";
        const auto bs = m.measure.ir_cutoff_delta() > 0
                            ? spectral::cutoff_bound_state(m, e_end)
                            : spectral::bound_state(m, e_end);
        pv.vec = project_state(d, m, InitialState::bound(m, bs));
        break;
      }
    }
    out.push_back(std::move(pv));
  }
  return out;
}

}  // namespace

AdiabaticRun oracle_evolve(const Model& m, const PulseSchedule& schedule,
                           double eta, double s_start, double s_end,
                           const InitialState& initial,
                           const std::vector<Probe>& probes, int n_modes,
                           const OracleOptions& opts) {
  if (n_modes < 2) throw std::invalid_argument("oracle_evolve: n_modes >= 2");
  const auto d = build_modes(m, n_modes);
  const auto st0 = project_state(d, m, initial);
  const auto pvs = resolve_oracle_probes(m, d, probes, schedule(s_end));
  auto energy = [&schedule, eta](double t) { return schedule(eta * t); };
  return run_oracle(energy, s_start / eta, s_end / eta, initial, pvs, d, st0,
                    opts, eta, s_start, s_end);
}

AdiabaticRun oracle_evolve_frozen(const Model& m, double E_a, double duration,
                                  const InitialState& initial,
                                  const std::vector<Probe>& probes,
                                  int n_modes, const OracleOptions& opts) {
  const auto d = build_modes(m, n_modes);
  const auto st0 = project_state(d, m, initial);
  const auto pvs = resolve_oracle_probes(m, d, probes, E_a);
  auto energy = [E_a](double) { return E_a; };
  return run_oracle(energy, 0.0, duration, initial, pvs, d, st0, opts, 0.0,
                    0.0, 0.0);
}

ArrowheadEigen arrowhead_eigen(const std::vector<double>& diag,
                               const std::vector<double>& couplings,
                               double E) {
  if (diag.size() != couplings.size() || diag.empty())
    throw std::invalid_argument("arrowhead_eigen: mismatched inputs");
  // drop numerically decoupled modes; they are exact eigenpairs with
  // negligible dot component whose secular roots sit below double resolution
  std::vector<double> lam, g;
  double gmax = 0;
  for (double v : couplings) gmax = std::max(gmax, std::fabs(v));
  for (size_t j = 0; j < diag.size(); ++j) {
    if (std::fabs(couplings[j]) > 1e-9 * std::max(gmax, 1e-300)) {
      lam.push_back(diag[j]);
      g.push_back(couplings[j]);
    }
  }
  const size_t n = lam.size();
  ArrowheadEigen out;
  auto secular = [&](double x) {
    double acc = x - E;
    for (size_t j = 0; j < n; ++j) acc -= g[j] * g[j] / (x - lam[j]);
    return acc;
  };
  auto dot_component = [&](double x) {
    double acc = 1.0;
    for (size_t j = 0; j < n; ++j) {
      const double r = g[j] / (x - lam[j]);
      acc += r * r;
    }
    return 1.0 / std::sqrt(acc);
  };
  double gsum2 = 0;
  for (double v : g) gsum2 += v * v;

  // root below the bath spectrum
  {
    double hi = lam.front() - 1e-13 * std::max(1.0, std::fabs(lam.front()));
    double f_hi = secular(hi);
    int guard = 0;
    while (f_hi <= 0 && ++guard < 40) {  // walk into the pole until the sign flips
      hi = lam.front() - (lam.front() - hi) * 0.25;
      f_hi = secular(hi);
    }
    if (f_hi <= 0) {
      out.evals.push_back(hi);  // pinched against the lowest bath node
      out.dot_comp.push_back(dot_component(hi));
    } else {
      double lo = std::min(lam.front(), E) - std::sqrt(gsum2) - 1.0;
      while (secular(lo) >= 0) lo = 2.0 * lo - std::fabs(E) - 1.0;
      const double x = num::brent_root(secular, lo, hi, secular(lo), f_hi, 1e-15);
      out.evals.push_back(x);
      out.dot_comp.push_back(dot_component(x));
    }
  }
  // interlaced roots
  for (size_t j = 0; j + 1 < n; ++j) {
    const double gap = lam[j + 1] - lam[j];
    double a = lam[j] + 1e-12 * gap;
    double b = lam[j + 1] - 1e-12 * gap;
    double fa = secular(a), fb = secular(b);
    int guard = 0;
    while (fa >= 0 && ++guard < 30) {
      a = lam[j] + (a - lam[j]) * 0.25;
      fa = secular(a);
    }
    guard = 0;
    while (fb <= 0 && ++guard < 30) {
      b = lam[j + 1] - (lam[j + 1] - b) * 0.25;
      fb = secular(b);
    }
    double x;
    if (fa >= 0 || fb <= 0) {
      x = std::fabs(fa) < std::fabs(fb) ? a : b;  // pinched interval
    } else {
      x = num::brent_root(secular, a, b, fa, fb, 1e-15);
    }
    out.evals.push_back(x);
    out.dot_comp.push_back(dot_component(x));
  }
  // root above the bath spectrum
  {
    double lo = lam.back() + 1e-13 * std::max(1.0, std::fabs(lam.back()));
    double f_lo = secular(lo);
    int guard = 0;
    while (f_lo >= 0 && ++guard < 40) {
      lo = lam.back() + (lo - lam.back()) * 0.25;
      f_lo = secular(lo);
    }
    if (f_lo >= 0) {
      out.evals.push_back(lo);
      out.dot_comp.push_back(dot_component(lo));
    } else {
      double hi = std::max(lam.back(), E) + std::sqrt(gsum2) + 1.0;
      while (secular(hi) <= 0) hi = 2.0 * hi + 1.0;
      const double x = num::brent_root(secular, lo, hi, f_lo, secular(hi), 1e-15);
      out.evals.push_back(x);
      out.dot_comp.push_back(dot_component(x));
    }
  }
  return out;
}

cx arrowhead_dot_survival(const ArrowheadEigen& eig, double t) {
  cx acc{};
  for (size_t k = 0; k < eig.evals.size(); ++k)
    acc += eig.dot_comp[k] * eig.dot_comp[k] *
           std::exp(cx(0.0, -eig.evals[k] * t));
  return acc;
}

}  // namespace divesim::oracle
