#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "divesim/schedule.hpp"
#include "divesim/spectral.hpp"

namespace divesim::dynamics {

using num::cx;
using spectral::BoundState;
using spectral::Model;

struct IntegratorError : std::runtime_error {
  IntegratorError(const std::string& msg, double t, double amp)
      : std::runtime_error(msg), t_fail(t), amp_abs(amp) {}
  double t_fail;
  double amp_abs;
};
struct ProbeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial wave function (tail_coef * r0(tail_pole) phi ; amp).
struct InitialState {
  cx amp{1.0, 0.0};
  cx tail_coef{0.0, 0.0};
  double tail_pole = 0.0;

  static InitialState bound(const Model& m, const BoundState& bs);
  static InitialState critical(const Model& m);
  static InitialState pure_dot();
};

enum class Probe { FinalBound, Critical, Amplitude };

// Kernel and driving-function samples on the convolution lag grid, shared
// across steps and across sweep workers. Immutable once built.
class KernelWorkspace {
 public:
  KernelWorkspace(const Model& m, double dt, int n_steps,
                  const std::vector<double>& poles);

  double dt() const { return dt_; }
  int n_steps() const { return n_steps_; }
  bool covers(double dt, int n_steps, const std::vector<double>& poles) const;

  const std::vector<cx>& ka() const { return ka_; }
  const std::vector<cx>& kb() const { return kb_; }
  const std::vector<cx>& h_full(double pole) const;
  const std::vector<cx>& ha(double pole) const;
  const std::vector<cx>& hb(double pole) const;

 private:
  struct PoleTables {
    double pole;
    std::vector<cx> full, a, b;
  };
  const PoleTables& find(double pole) const;

  double dt_;
  int n_steps_;
  std::vector<cx> ka_, kb_;
  std::vector<PoleTables> poles_;
};

struct RunOptions {
  double dt = 0.0;  // 0 -> min(0.02, 0.1/E_max)
  double contractivity_tol = 1e-3;
  std::shared_ptr<const KernelWorkspace> kernels;  // optional shared tables
};

struct AdiabaticRun {
  double eta = 0;
  double s_start = 0, s_end = 0;
  double t_start = 0;
  double dt = 0;
  InitialState initial;
  std::vector<cx> amplitude;               // a(t_start + j dt)
  std::map<std::string, cx> overlaps;      // "final", "critical", "amp"
  double norm_drift = 0;                   // oracle runs only
};

// Exact scalar reduction of the Schroedinger dynamics: the dot amplitude
// obeys a Volterra integro-differential equation with memory kernel K and
// resolvent-weighted driving h; propagated by product-trapezoidal stepping
// with one predictor-corrector pass per step.
AdiabaticRun evolve(const Model& m, const PulseSchedule& schedule, double eta,
                    double s_start, double s_end, const InitialState& initial,
                    const std::vector<Probe>& probes,
                    const RunOptions& opts = {});

// Same propagation with the dot energy frozen at E_a (stationary check).
AdiabaticRun evolve_frozen(const Model& m, double E_a, double duration,
                           const InitialState& initial,
                           const std::vector<Probe>& probes,
                           const RunOptions& opts = {});

double survival_probability(const AdiabaticRun& run, const std::string& probe);

// || evolved projection - critical projection || via the critical overlap.
double threshold_distance(const AdiabaticRun& run);

struct MicroscopicResult {
  double survival = 1.0;
  double loss = 0.0;
  double s_window = 0.0;       // s_end - s_c = alpha * eta^{4/(2 nu + 7)}
  double eta0_alpha = 0.0;     // alpha^{2(2 nu + 7)}
  bool within_lemma_regime = false;
};

// Evolve the critical eigenvector from s_c over the microscopic window and
// return its critical survival probability.
MicroscopicResult microscopic_survival(const Model& m,
                                       const PulseSchedule& schedule,
                                       double eta, double alpha,
                                       const RunOptions& opts = {});

}  // namespace divesim::dynamics
