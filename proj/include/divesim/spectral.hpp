#pragma once

#include <stdexcept>

#include "divesim/measure.hpp"

namespace divesim::spectral {

using formfactor::SpectralMeasure;
using num::cx;

struct NoBoundStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnsupportedRegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DispersiveAssumptionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NormalizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dot level coupled to the open channel through the reduced measure.
// tau = 0 is the decoupled limit, kept legal for testing.
struct Model {
  SpectralMeasure measure;
  double tau = 0.5;
};

struct BoundState {
  double E = 0;               // dot energy
  double lambda = 0;          // eigenvalue, root of F(., E)
  double dot_weight_sq = 1;   // |<dot, Psi(E)>|^2 = 1/(1 + tau^2 m2(lambda))
};

struct CriticalData {
  double E_c = 0;
  double dot_weight_sq = 1;   // threshold limit of the dot weight
};

// F(x, E) = E - x - tau^2 int mu(l)/(l - x) dl on the resolvent set x < 0.
double feshbach_below(const Model& m, double x, double E);

// Boundary value F(r^2 + i0, E):
//   Re = E - r^2 - tau^2 P.V. int mu(l)/(l - r^2) dl,
//   Im = -pi tau^2 mu(r^2).
cx feshbach_boundary(const Model& m, double r, double E);

CriticalData critical_energy(const Model& m);

// Unique negative root of F(., E) for E < E_c.
BoundState bound_state(const Model& m, double E);

// Bound state of the cutoff model for E < delta^2; the root may sit inside
// (0, delta^2), i.e. within the spectral gap of the cutoff Hamiltonian.
BoundState cutoff_bound_state(const Model& m, double E);

// rho(l) = tau^2 mu(l) / |F(l + i0, E)|^2, the a.c. weight of the dot state.
double spectral_density(const Model& m, double E, double lambda);

// int rho dl (exact principal values at every node; no spline shortcut)
double density_sum(const Model& m, double E);

// r_E > 0 with Re F(r_E^2 + i0, E) = 0 (real-axis resonance locator).
double resonance_location(const Model& m, double E);

struct Assumption3Result {
  bool holds = false;
  double infimum = 0;   // located inf_r |F(r^2 + i0, E_a)|
  double r_at_min = 0;
};
Assumption3Result assumption3_check(const Model& m, double E_a);

// Fourier transform of rho: the survival amplitude of the dot state under
// the frozen over-critical Hamiltonian. Construction checks the dispersive
// condition and caches the principal-value function on a graded grid.
class SurvivalTransform {
 public:
  SurvivalTransform(Model m, double E_a);
  cx operator()(double t) const;
  double density(double lambda) const;
  const Assumption3Result& dispersive() const { return a3_; }

 private:
  double pv(double lambda) const;
  Model model_;
  double E_a_;
  Assumption3Result a3_;
  num::CubicSpline pv_spline_;  // P(r), lambda = r^2
  double spline_lambda_max_ = 0;
  density::DensityView rho_view_;
};

cx static_survival(const Model& m, double E_a, double t);

// Rank-one state (channel tail; dot amplitude) with tail tail_coef*r0(pole)phi.
struct RankOneState {
  cx dot_amp = 1.0;
  double tail_coef = 0.0;
  double tail_pole = 0.0;
};

RankOneState bound_rank_one(const Model& m, const BoundState& bs);
RankOneState critical_rank_one(const Model& m);

cx rank_one_inner(const Model& m, const RankOneState& u, const RankOneState& v);
double rank_one_norm_sq(const Model& m, const RankOneState& u);

// || |u><u| - |v><v| || = sqrt(1 - |<u,v>|^2) for unit rank-one projections.
double overlap_distance(const Model& m, const RankOneState& u,
                        const RankOneState& v);
double overlap_to_distance(cx overlap);

}  // namespace divesim::spectral
