#include <cmath>

#include "doctest.h"
#include "divesim/oracle.hpp"
#include "divesim/spectral.hpp"
#include "test_oracles.hpp"

using namespace divesim;
using formfactor::SpectralMeasure;
using spectral::Model;

namespace {

const double kPi = 3.14159265358979323846;

Model standard_model(double tau = 0.5) {
  return {SpectralMeasure::power_law(1, 4.0), tau};
}

Model cutoff_model(double delta, double tau = 0.5) {
  return {SpectralMeasure::ir_cutoff(SpectralMeasure::power_law(1, 4.0), delta),
          tau};
}

}  // namespace

TEST_CASE("feshbach map below threshold") {
  const Model m0 = standard_model(0.0);
  CHECK(spectral::feshbach_below(m0, -2.0, -2.0) == doctest::Approx(0.0));

  const Model m = standard_model();
  // positive far to the left
  CHECK(spectral::feshbach_below(m, -50.0, -1.0) > 0.0);
  // strictly decreasing in x
  double prev = spectral::feshbach_below(m, -3.0, 0.0);
  for (double x : {-2.0, -1.0, -0.3, -0.05}) {
    const double v = spectral::feshbach_below(m, x, 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(spectral::feshbach_below(m, 0.5, 0.0), std::domain_error);

  // independent quadrature of E - x - tau^2 int mu/(l - x)
  const double x = -0.1;
  const double m1 = test_oracles::measure_integral(
      [&](double l) { return m.measure.mu(l); },
      [x](double l) { return 1.0 / (l - x); }, 400.0, 400000);
  CHECK(std::fabs(spectral::feshbach_below(m, x, 0.0) - (0.0 - x - 0.25 * m1)) <
        1e-8);
}

TEST_CASE("feshbach boundary values") {
  const Model cut = cutoff_model(0.5);
  const auto f_in_gap = spectral::feshbach_boundary(cut, 0.4, 0.1);
  CHECK(f_in_gap.imag() == 0.0);  // below the cutoff mu vanishes

  const Model m = standard_model();
  for (double r : {0.3, 0.8, 1.7}) {
    const auto f = spectral::feshbach_boundary(m, r, 0.4);
    CHECK(f.imag() ==
          doctest::Approx(-kPi * 0.25 * m.measure.mu(r * r)).epsilon(1e-12));
    CHECK(f.imag() < 0.0);
  }

  // principal value against the Lorentzian vanishing-epsilon oracle
  const double x = 0.6;
  const double pv_ref = test_oracles::pv_lorentzian(
      [&](double l) { return m.measure.mu(l); }, x, 60.0);
  const auto f = spectral::feshbach_boundary(m, std::sqrt(x), 0.4);
  const double pv_lib = (0.4 - x - f.real()) / 0.25;
  CHECK(std::fabs(pv_lib - pv_ref) < 1e-4);

  // exactly one zero of Re F for over-critical dot energy
  const auto crit = spectral::critical_energy(m);
  const double E = crit.E_c + 0.2;
  const double r_e = spectral::resonance_location(m, E);
  CHECK(r_e * r_e > 0.0);
  CHECK(r_e * r_e < 2.0 * (E - crit.E_c));
  int sign_changes = 0;
  double prev = spectral::feshbach_boundary(m, 1e-4, E).real();
  for (int i = 1; i <= 400; ++i) {
    const double r = 3.0 * i / 400.0;
    const double v = spectral::feshbach_boundary(m, r, E).real();
    if ((prev > 0) != (v > 0)) ++sign_changes;
    prev = v;
  }
  CHECK(sign_changes == 1);
}

TEST_CASE("critical energy") {
  const Model m1 = standard_model(0.25);
  const Model m2 = standard_model(0.5);
  const auto c1 = spectral::critical_energy(m1);
  const auto c2 = spectral::critical_energy(m2);
  CHECK(c2.E_c / c1.E_c == doctest::Approx(4.0).epsilon(1e-10));
  // m1(0) = 1 exactly for (1, 4): E_c = tau^2
  CHECK(c2.E_c == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(c2.dot_weight_sq == doctest::Approx(1.0 / (1.0 + 0.25 * 5.0)).epsilon(1e-9));

  const Model cut = cutoff_model(0.5);
  CHECK(spectral::critical_energy(cut).E_c <= 0.25 / (0.5 * 0.5) + 1e-12);
}

TEST_CASE("bound state: root quality, monotonicity, threshold slope") {
  const Model m0 = standard_model(0.0);
  const auto decoupled = spectral::bound_state(m0, -1.0);
  CHECK(decoupled.lambda == doctest::Approx(-1.0));
  CHECK(decoupled.dot_weight_sq == doctest::Approx(1.0));

  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  CHECK_THROWS_AS(spectral::bound_state(m, crit.E_c + 0.01),
                  spectral::NoBoundStateError);

  double prev_lambda = -std::numeric_limits<double>::infinity();
  for (double E : {-1.0, -0.5, 0.0, 0.1, 0.2}) {
    const auto bs = spectral::bound_state(m, E);
    CHECK(bs.lambda < E);
    CHECK(bs.lambda < 0.0);
    CHECK(bs.lambda > prev_lambda);
    prev_lambda = bs.lambda;
    // residual and bracketing
    CHECK(std::fabs(spectral::feshbach_below(m, bs.lambda, E)) < 1e-11);
    CHECK(spectral::feshbach_below(m, bs.lambda - 1e-7, E) > 0.0);
    CHECK(spectral::feshbach_below(m, bs.lambda + 1e-7, E) < 0.0);
  }

  // lambda(E_c - eps)/(-eps) -> 1/(1 + tau^2 m2(0)) = 4/9
  const double slope_lim = crit.dot_weight_sq;
  const auto near = spectral::bound_state(m, crit.E_c - 1e-3);
  CHECK(near.lambda / (-1e-3) == doctest::Approx(slope_lim).epsilon(0.05));
  // and the dot weight is continuous up to the threshold
  const auto nearer = spectral::bound_state(m, crit.E_c - 1e-4);
  CHECK(std::fabs(nearer.dot_weight_sq - crit.dot_weight_sq) < 1e-2);
}

TEST_CASE("cutoff bound state survives inside the gap") {
  const Model m0 = cutoff_model(0.5, 0.0);
  CHECK(spectral::cutoff_bound_state(m0, 0.1).lambda == doctest::Approx(0.1));

  const double delta = 0.5;
  const Model m_small = cutoff_model(delta, 0.05);
  const double E = 0.5 * delta * delta;
  const auto bs = spectral::cutoff_bound_state(m_small, E);
  CHECK(bs.lambda < E);
  CHECK(E < delta * delta);
  const double first_order =
      0.05 * 0.05 * m_small.measure.resolvent_moment(1, E);
  CHECK(bs.lambda > E - 1.1 * first_order);
  CHECK(delta * delta - bs.lambda >= delta * delta - E);

  const Model m = cutoff_model(0.5);
  CHECK_THROWS_AS(spectral::cutoff_bound_state(m, 0.3),
                  spectral::UnsupportedRegimeError);
  CHECK_THROWS_AS(spectral::cutoff_bound_state(standard_model(), -1.0),
                  spectral::UnsupportedRegimeError);
}

TEST_CASE("spectral density: positivity, gap, sum rules") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);

  const Model cut = cutoff_model(0.6);
  CHECK(spectral::spectral_density(cut, 0.2, 0.3) == 0.0);  // inside the gap

  const double e_above = crit.E_c + 0.2;
  CHECK(spectral::spectral_density(m, e_above, 0.3) >= 0.0);
  const double sum_above = spectral::density_sum(m, e_above);
  CHECK(std::fabs(sum_above - 1.0) < 1e-6);

  const double e_below = crit.E_c - 0.1;
  const auto bs = spectral::bound_state(m, e_below);
  const double sum_below = spectral::density_sum(m, e_below) + bs.dot_weight_sq;
  CHECK(std::fabs(sum_below - 1.0) < 1e-6);
}

TEST_CASE("density threshold and tail exponents") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  const double E = crit.E_c + 0.2;
  // rho ~ c l^{3/2} at the threshold
  const double r1 = spectral::spectral_density(m, E, 1e-5) / std::pow(1e-5, 1.5);
  const double r2 = spectral::spectral_density(m, E, 1e-6) / std::pow(1e-6, 1.5);
  CHECK(r1 == doctest::Approx(r2).epsilon(0.01));
  // and decays at least like l^{-5/2} far out
  const double big = spectral::spectral_density(m, E, 500.0);
  CHECK(big < 10.0 * std::pow(500.0, -2.5));
}

TEST_CASE("assumption3 check") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  const double e_a = crit.E_c + 0.2;
  const auto a3 = spectral::assumption3_check(m, e_a);
  CHECK(a3.holds);
  const double r_e = spectral::resonance_location(m, e_a);
  CHECK(a3.infimum >= 0.5 * kPi * 0.25 * m.measure.mu(r_e * r_e));

  const Model cut = cutoff_model(0.8);
  const auto a3_gap = spectral::assumption3_check(cut, 0.3);  // E_a < delta^2
  CHECK_FALSE(a3_gap.holds);

  const Model m0 = standard_model(0.0);
  CHECK_FALSE(spectral::assumption3_check(m0, 0.7).holds);
}

TEST_CASE("static survival amplitude") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  const double e_a = crit.E_c + 0.2;
  spectral::SurvivalTransform amp(m, e_a);

  CHECK(std::abs(amp(0.0) - num::cx(1.0, 0.0)) < 1e-6);
  CHECK(std::abs(amp(12.0) - std::conj(amp(-12.0))) < 1e-10);

  // dispersive decay exponent on two decades; probed further above the
  // critical point so the resonance ring-down has cleared the window
  spectral::SurvivalTransform amp_hi(m, crit.E_c + 0.5);
  std::vector<double> lx, ly;
  for (int i = 0; i < 7; ++i) {
    const double t = 100.0 * std::pow(100.0, i / 6.0);
    lx.push_back(std::log(t));
    ly.push_back(std::log(std::abs(amp_hi(t))));
  }
  const auto fit = num::fit_line(lx, ly);
  CHECK(fit.slope == doctest::Approx(-2.5).epsilon(0.06));

  // finite-mode diagonalization oracle
  const auto nodes = m.measure.discretize(4000);
  std::vector<double> diag, g;
  for (const auto& nd : nodes) {
    diag.push_back(nd.lambda);
    g.push_back(m.tau * std::sqrt(nd.weight * m.measure.mu(nd.lambda)));
  }
  const auto eig = oracle::arrowhead_eigen(diag, g, e_a);
  for (double t : {5.0, 20.0}) {
    const auto ref = oracle::arrowhead_dot_survival(eig, t);
    CHECK(std::abs(amp(t) - ref) < 1e-3);
  }

  CHECK_THROWS_AS(spectral::static_survival(standard_model(0.0), 0.7, 1.0),
                  spectral::DispersiveAssumptionError);
}

TEST_CASE("rank-one overlap distances") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  const auto psi_c = spectral::critical_rank_one(m);
  CHECK(std::fabs(spectral::rank_one_norm_sq(m, psi_c) - 1.0) < 1e-9);

  CHECK(spectral::overlap_distance(m, psi_c, psi_c) ==
        doctest::Approx(0.0).epsilon(1e-10));

  // orthogonal pair: pure dot against a pure-tail state
  spectral::RankOneState dot{num::cx(1.0, 0.0), 0.0, 0.0};
  const double n_tail = m.measure.resolvent_moment(2, -0.4);
  spectral::RankOneState tail{num::cx(0.0, 0.0), 1.0 / std::sqrt(n_tail), -0.4};
  CHECK(spectral::overlap_distance(m, dot, tail) == doctest::Approx(1.0));

  spectral::RankOneState bad{num::cx(0.7, 0.0), 0.0, 0.0};
  CHECK_THROWS_AS(spectral::overlap_distance(m, bad, dot),
                  spectral::NormalizationError);

  // ||P(E) - P_c|| falls as E approaches E_c, within the 1/4-power envelope
  double prev = 1.0;
  for (double gap : {1e-1, 1e-2, 1e-3}) {
    const auto bs = spectral::bound_state(m, crit.E_c - gap);
    const double d =
        spectral::overlap_distance(m, spectral::bound_rank_one(m, bs), psi_c);
    CHECK(d < prev);
    CHECK(d <= 2.0 * std::pow(gap, 0.25));
    prev = d;
  }
}

TEST_CASE("projection derivative blow-up rate") {
  const Model m = standard_model();
  const auto crit = spectral::critical_energy(m);
  std::vector<double> products;
  for (double gap : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double E = crit.E_c - gap;
    const double step = 0.01 * gap;
    const auto u = spectral::bound_rank_one(m, spectral::bound_state(m, E));
    const auto v =
        spectral::bound_rank_one(m, spectral::bound_state(m, E + step));
    const double rate = spectral::overlap_distance(m, u, v) / step;
    products.push_back(rate * std::pow(gap, 0.75));
  }
  const double vmax = *std::max_element(products.begin(), products.end());
  const double vmin = *std::min_element(products.begin(), products.end());
  CHECK(vmax / vmin < 3.0);
}
