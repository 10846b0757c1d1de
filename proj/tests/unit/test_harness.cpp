#include <cmath>

#include "doctest.h"
#include "divesim/harness.hpp"

using namespace divesim;

namespace {

nlohmann::json base_config() {
  return nlohmann::json{
      {"model",
       {{"measure", {{"family", "power_law"}, {"nu", 1}, {"p", 4.0}}},
        {"tau", 0.5}}},
      {"schedule", {{"shape", "sin2"}, {"E_lo", -1.0}, {"E_m", 0.5}}}};
}

}  // namespace

TEST_CASE("fit_exponent on exact power laws") {
  std::vector<std::pair<double, double>> lin, pow52;
  for (double x : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    lin.emplace_back(x, x);
    pow52.emplace_back(x, std::pow(x, -2.5));
  }
  auto [s1, e1] = harness::fit_exponent(lin);
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e1 < 1e-10);
  auto [s2, e2] = harness::fit_exponent(pow52);
  CHECK(s2 == doctest::Approx(-2.5).epsilon(1e-10));
  CHECK(e2 < 1e-9);
  CHECK_THROWS(harness::fit_exponent({{1.0, 1.0}, {2.0, 2.0}}));
}

TEST_CASE("config validation and defaults") {
  auto doc = base_config();
  doc["scenario"] = "spectral";
  const auto cfg = harness::parse_config(doc);
  CHECK(cfg.scenario == harness::Scenario::Spectral);
  CHECK(cfg.model.tau == doctest::Approx(0.5));
  CHECK(cfg.schedule.E_max() == doctest::Approx(0.5));

  auto bad = base_config();
  bad["scenario"] = "spectral";
  bad["surprise"] = 1;
  CHECK_THROWS(harness::parse_config(bad));

  auto no_measure = nlohmann::json{{"scenario", "spectral"},
                                   {"model", {{"tau", 0.5}}}};
  CHECK_THROWS(harness::parse_config(no_measure));

  // default pulse peak lands at twice the critical energy
  auto no_em = base_config();
  no_em["scenario"] = "spectral";
  no_em["schedule"].erase("E_m");
  const auto cfg2 = harness::parse_config(no_em);
  CHECK(cfg2.schedule.E_max() == doctest::Approx(0.5).epsilon(1e-6));

  // gap scenario demands a cutoff measure with room below the gap
  auto gap_bad = base_config();
  gap_bad["scenario"] = "gap_case";
  CHECK_THROWS(harness::parse_config(gap_bad));
}

TEST_CASE("spectral scenario: decoupled model reproduces lambda = E") {
  auto doc = base_config();
  doc["scenario"] = "spectral";
  doc["model"]["tau"] = 0.0;
  const auto cfg = harness::parse_config(doc);
  const auto rec = harness::run_scenario(cfg);
  CHECK(rec.summary["E_c"].get<double>() == doctest::Approx(0.0));
  for (const auto& row : rec.rows)
    CHECK(row[1] == doctest::Approx(row[0]).epsilon(1e-12));
}

TEST_CASE("scenario outputs are deterministic and worker-count independent") {
  auto doc = base_config();
  doc["scenario"] = "threshold_adiabatic";
  doc["etas"] = {0.4, 0.2};
  doc["dt"] = 0.04;
  auto cfg = harness::parse_config(doc);
  const auto rec1 = harness::run_scenario(cfg);
  const auto rec2 = harness::run_scenario(cfg);
  CHECK(harness::to_csv(rec1) == harness::to_csv(rec2));

  cfg.workers = 2;
  const auto rec3 = harness::run_scenario(cfg);
  CHECK(harness::to_csv(rec1) == harness::to_csv(rec3));
}

TEST_CASE("csv serialization carries headers and full precision") {
  harness::SweepRecord rec;
  rec.scenario = "demo";
  rec.columns = {"x", "y"};
  rec.rows = {{0.1, 1.0 / 3.0}};
  rec.row_status = {"ok"};
  const auto csv = harness::to_csv(rec);
  CHECK(csv.find("x,y,status\n") == 0);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  CHECK(harness::plot_script(rec).find("demo.csv") != std::string::npos);
}
