#pragma once

#include "divesim/dynamics.hpp"

namespace divesim::oracle {

using dynamics::AdiabaticRun;
using dynamics::InitialState;
using dynamics::Probe;
using dynamics::PulseSchedule;
using num::cx;
using spectral::Model;

struct OracleOptions {
  double dt_record = 0.0;   // 0 -> match the Volterra default
  double substep = 0.004;   // initial micro step
  double step_tol = 1e-7;   // embedded per-macro-step error estimate
};

// Finite-mode Friedrichs discretization: Hermitian (N+1)x(N+1) arrow matrix
// with bath diagonal from discretize(N) and dot couplings tau*sqrt(w_j mu_j),
// propagated by a unitary split-step scheme (exact bath rotations, exact
// rank-two coupling kicks) composed to fourth order, with embedded step
// control. Fully independent of the Volterra path.
AdiabaticRun oracle_evolve(const Model& m, const PulseSchedule& schedule,
                           double eta, double s_start, double s_end,
                           const InitialState& initial,
                           const std::vector<Probe>& probes, int n_modes,
                           const OracleOptions& opts = {});

AdiabaticRun oracle_evolve_frozen(const Model& m, double E_a, double duration,
                                  const InitialState& initial,
                                  const std::vector<Probe>& probes,
                                  int n_modes, const OracleOptions& opts = {});

// Eigen-decomposition of the arrow matrix via its secular equation; exposes
// eigenvalues and dot components (enough to propagate any rank-one data).
struct ArrowheadEigen {
  std::vector<double> evals;
  std::vector<double> dot_comp;  // <dot, u_k>
};
ArrowheadEigen arrowhead_eigen(const std::vector<double>& diag,
                               const std::vector<double>& couplings, double E);

// <dot, e^{-itH} dot> from the decomposition.
cx arrowhead_dot_survival(const ArrowheadEigen& eig, double t);

}  // namespace divesim::oracle
