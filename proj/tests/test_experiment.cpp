#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "udcran/experiment.hpp"

using namespace udcran;

namespace {

const char* kSmall = R"({
  "profile": "desk",
  "system": { "M": 2, "K": 2, "N": 8 },
  "sweep": { "variable": "W", "values": [10, 60] },
  "layouts": 2,
  "realizations_per_layout": 2,
  "schemes": ["proposed-greedy", "single-rrh", "conventional"],
  "seed": 7
})";

}  // namespace

TEST_CASE("empty config gives the reference defaults") {
  const ExperimentConfig cfg = validateConfig("");
  CHECK(cfg.profile == "paper");
  CHECK(cfg.scenario.dims.rrhs == 6);
  CHECK(cfg.scenario.dims.users == 8);
  CHECK(cfg.scenario.dims.subcarriers == 128);
  CHECK(cfg.scenario.dims.accessBandwidthHz == 20e6);
  CHECK(cfg.scenario.maxPowerDbm == 24.0);
  CHECK(cfg.scenario.layout.clusterRadius == 500.0);
  CHECK(cfg.scenario.layout.cpDistance == 2000.0);
  CHECK(cfg.layouts * cfg.realizationsPerLayout == 100);
  CHECK(cfg.schemes.size() == 5);
  CHECK(cfg.sweepVariable == SweepVariable::W);
  CHECK_FALSE(cfg.sweepValues.empty());
}

TEST_CASE("profile override") {
  const ExperimentConfig cfg = validateConfig(R"({"profile": "paper"})", std::string("desk"));
  CHECK(cfg.profile == "desk");
  CHECK(cfg.scenario.dims.subcarriers == 64);
  CHECK_THROWS_AS(validateConfig(R"({"profile": "lab"})"), ConfigError);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(validateConfig(R"({"layout": {"cluster_radius_m": -5}})"), ConfigError);
  CHECK_THROWS_AS(validateConfig(R"({"system": {"M": 30}, "schemes": ["proposed-exhaustive"]})"), ConfigError);
  CHECK_NOTHROW(validateConfig(R"({"system": {"M": 30}, "schemes": ["proposed-greedy"]})"));
  CHECK_THROWS_AS(validateConfig(R"({"bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(validateConfig(R"({"schemes": ["nope"]})"), ConfigError);
  CHECK_THROWS_AS(validateConfig(R"({"system": {"K": "eight"}})"), ConfigError);
  try {
    validateConfig("{\n  \"layouts\": 2,\n  oops\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  const std::string m30 = R"({"system": {"M": 30}, "schemes": ["equal-power"]})";
  try {
    validateConfig(m30);
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("greedy") != std::string::npos);
  }
}

TEST_CASE("run seeds are distinct and stable") {
  CHECK(runSeed(1, 0, 0) == runSeed(1, 0, 0));
  CHECK(runSeed(1, 0, 0) != runSeed(1, 0, 1));
  CHECK(runSeed(1, 0, 0) != runSeed(1, 1, 0));
  CHECK(runSeed(1, 0, -1) != runSeed(1, 0, 0));
  CHECK(runSeed(1, 0, 0) != runSeed(2, 0, 0));
}

TEST_CASE("csv layout") {
  const std::string empty = resultsToCsv({});
  std::istringstream in(empty);
  std::string units, header, extra;
  std::getline(in, units);
  std::getline(in, header);
  CHECK(units.rfind("#", 0) == 0);
  CHECK(header == "sweep_value,scheme,mean_wsr_mbps,std_wsr_mbps,mean_dual_gap,mean_runtime_s,n_runs");
  CHECK_FALSE(std::getline(in, extra));

  ResultRow r{50, "proposed-greedy", 123.456, 1.5, 0.001, 0.25, 10};
  const std::string csv = resultsToCsv({r});
  CHECK(csv.find("\n50,proposed-greedy,123.456,1.5,0.001,0.25,10\n") != std::string::npos);
}

TEST_CASE("json round trip") {
  const std::vector<ResultRow> rows{{10, "single-rrh", 1.0 / 3.0, 0.1, 0.0, 2.5, 4},
                                    {20, "conventional", 99.75, 0.0, 0.02, 0.0, 1}};
  CHECK(resultsFromJson(resultsToJson(rows)) == rows);
}

TEST_CASE("experiments are reproducible and aggregates recomputable") {
  ExperimentConfig cfg = validateConfig(kSmall);
  cfg.recordRuntime = false;
  const ExperimentResult a = runExperiment(cfg);
  cfg.jobs = 3;
  const ExperimentResult b = runExperiment(cfg);
  CHECK(a.failures == 0);
  CHECK(resultsToCsv(a.rows) == resultsToCsv(b.rows));
  CHECK(a.rows.size() == 6);
  CHECK(a.runs.size() == 2 * 3 * 4);
  CHECK(aggregate(a.runs, cfg.sweepValues, cfg.schemes) == a.rows);

  for (const ResultRow& row : a.rows) {
    CHECK(row.nRuns == 4);
    CHECK(row.meanRuntimeS == 0.0);
    double sum = 0.0;
    for (const RunRecord& r : a.runs) {
      if (r.sweepValue == row.sweepValue && toString(r.scheme) == row.scheme) sum += r.wsr / 1e6;
    }
    CHECK(row.meanWsrMbps == doctest::Approx(sum / 4));
  }

  // Same seeds across schemes and sweep values.
  for (const RunRecord& r : a.runs) {
    CHECK(r.layoutSeed == runSeed(7, r.layout, -1));
    CHECK(r.fadingSeed == runSeed(7, r.layout, r.realization));
  }
}

TEST_CASE("emitResults writes files and reports bad paths") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = (dir / "udcran_emit_test.json").string();
  const std::vector<ResultRow> rows{{10, "single-rrh", 5.0, 0.0, 0.0, 0.0, 1}};
  emitResults(rows, "json", path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(resultsFromJson(ss.str()) == rows);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(emitResults(rows, "xml", path), std::invalid_argument);
  CHECK_THROWS_AS(emitResults(rows, "csv", "/nonexistent-dir/x/y.csv"), std::runtime_error);
}
