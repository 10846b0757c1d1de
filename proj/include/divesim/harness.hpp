#pragma once

#include <string>
#include <utility>
#include <vector>

#include "divesim/diagnostics.hpp"
#include "divesim/oracle.hpp"

#include "json.hpp"

namespace divesim::harness {

enum class Scenario {
  Spectral,
  Dispersion,
  ThresholdAdiabatic,
  Breakdown,
  GapCase,
  Microscopic,
  Dyson
};

Scenario scenario_from_name(const std::string& name);
std::string scenario_name(Scenario s);

// Pinned acceptance thresholds; the CLI --check mode and the acceptance
// suite both read these.
namespace accept {
inline constexpr double kSumRuleTol = 1e-6;
inline constexpr double kThresholdSlopeRelTol = 0.05;
inline constexpr double kProjectionRateVariation = 3.0;
inline constexpr double kDispersionSlope = -2.5;
inline constexpr double kDispersionSlopeTol = 0.15;
inline constexpr double kOracleMaxErr = 1e-3;
inline constexpr double kBreakdownRatio = 0.5;
inline constexpr double kGapSurvival = 0.99;
inline constexpr double kThresholdSlopeMin = 1.0 / 13.0 - 0.02;
inline constexpr double kMicroRatioBand = 1.8;
inline constexpr double kTrivialSurvivalTol = 1e-8;
inline constexpr double kOracleNormTol = 1e-6;
}  // namespace accept

struct ScenarioConfig {
  ScenarioConfig(spectral::Model m, dynamics::PulseSchedule s)
      : model(std::move(m)), schedule(std::move(s)) {}

  Scenario scenario = Scenario::Spectral;
  spectral::Model model;
  dynamics::PulseSchedule schedule;
  std::vector<double> etas;
  double eta_single = 0.01;
  std::vector<double> alphas{0.05, 0.1, 0.2};
  double E_a_offset = 0.2;
  double t_lo = 100.0, t_hi = 10000.0;
  int t_points = 13;
  double dt = 0.0;
  int oracle_modes = 2000;
  int workers = 1;
  std::string out_dir;
  bool check = false;
};

// Parse and validate a config document. Unknown keys are errors. The
// scenario_override (from the CLI) wins over the document's "scenario".
ScenarioConfig parse_config(const nlohmann::json& doc,
                            const std::string& scenario_override = "");
ScenarioConfig load_config(const std::string& path,
                           const std::string& scenario_override = "");

struct SweepRecord {
  std::string scenario;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_status;  // "ok" or a failure reason
  nlohmann::json summary;               // fits, pass flags, runtime_seconds
  bool pass = true;
};

SweepRecord run_scenario(const ScenarioConfig& cfg);

// OLS fit of ln y against ln x; needs >= 3 positive pairs.
std::pair<double, double> fit_exponent(
    const std::vector<std::pair<double, double>>& pairs);

// Deterministic serializations. runtime_seconds lives in the JSON summary
// only; the CSV is byte-identical across reruns of the same config.
std::string to_csv(const SweepRecord& rec);
std::string plot_script(const SweepRecord& rec);
void write_outputs(const SweepRecord& rec, const std::string& dir);

}  // namespace divesim::harness
