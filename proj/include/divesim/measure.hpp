#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "divesim/density.hpp"
#include "divesim/numerics.hpp"

#include "json.hpp"

namespace divesim::formfactor {

using num::cx;

enum class MeasureFamily { PowerLaw, IRCutoff, ExpFlat, Tabulated };

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  double lambda;
  double weight;
};

// Reduced spectral measure mu(lambda) of the coupling function: the
// angular-averaged squared Fourier modulus in the energy variable, normalized
// to unit mass. Immutable after construction; all operations are pure.
class SpectralMeasure {
 public:
  // mu(l) = c l^{nu+1/2} (1+l)^{-p}; normalization in closed form.
  static SpectralMeasure power_law(int nu, double p, double lambda_trunc = 0);
  // mu(l) = c e^{-2 s / l} (1+l)^{-p}: infinitely flat at threshold.
  static SpectralMeasure exp_flat(double scale, double p = 4.0,
                                  double lambda_trunc = 0);
  // base density restricted to l > delta^2 and renormalized.
  static SpectralMeasure ir_cutoff(SpectralMeasure base, double delta);
  // linear interpolation between nodes, zero outside; second-class family.
  static SpectralMeasure tabulated(std::vector<double> nodes,
                                   std::vector<double> values);

  // {family, nu, p, delta, scale, Lambda, N_default, nodes, values}
  static SpectralMeasure from_config(const nlohmann::json& block);

  double mu(double lambda) const;
  double operator()(double lambda) const { return mu(lambda); }

  MeasureFamily family() const { return family_; }
  double norm_constant() const { return norm_constant_; }
  double lambda_trunc() const { return lambda_trunc_; }
  double support_min() const { return support_min_; }
  double ir_cutoff_delta() const { return delta_; }
  // IR order nu of the underlying coupling (the one of the base density for
  // cutoff measures); 99 marks an effectively flat threshold.
  int ir_order() const { return ir_order_; }
  int max_moment_at_zero() const { return max_moment_at_zero_; }
  double tail_exponent() const { return tail_beta_; }
  int default_nodes() const { return n_default_; }

  // m_k(shift) = int mu(l) (l - shift)^{-k} dl, k in {1,2}, shift <= 0.
  double moment(int k, double shift) const;
  // same integral for any pole strictly below the support (cutoff regime).
  double resolvent_moment(int k, double x) const;

  // generic weighted integrals against mu
  double integral(const std::function<double(double)>& w = nullptr) const;
  double principal_value(double x) const;
  double principal_value_weighted(const std::function<double(double)>& w,
                                  double x) const;

  // K(t) = int mu(l) e^{-i l t} dl
  cx kernel_K(double t) const;
  // h(t; x0) = int mu(l) e^{-i l t}/(l - x0) dl, x0 <= 0
  cx driving_h(double t, double x0) const;
  // h2(t; x0, x1) = int mu(l) e^{-i l t}/((l-x0)(l-x1)) dl
  cx driving_h2(double t, double x0, double x1) const;

  // graded quadrature grid: nodes increasing, weights renormalized so that
  // sum w_j mu(l_j) = 1
  std::vector<Node> discretize(int n) const;

  density::DensityView view(
      const std::function<double(double)>& w = nullptr,
      int resolvent_powers = 0) const;

 private:
  SpectralMeasure() = default;

  MeasureFamily family_ = MeasureFamily::PowerLaw;
  int nu_ = 1;
  double p_ = 4.0;
  double scale_ = 1.0;
  double delta_ = 0.0;
  double norm_constant_ = 1.0;
  double lambda_trunc_ = 100.0;
  double support_min_ = 0.0;
  double tail_beta_ = 2.5;
  double tail_amp_ = 1.0;
  int ir_order_ = 1;
  int max_moment_at_zero_ = 2;
  int n_default_ = 2000;
  std::shared_ptr<const SpectralMeasure> base_;  // IRCutoff
  double cutoff_renorm_ = 1.0;
  std::vector<double> tab_nodes_, tab_values_;   // Tabulated
};

}  // namespace divesim::formfactor
