#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "udcran/benchmarks.hpp"
#include "udcran/channel.hpp"

namespace udcran {

/// Raised for unparsable or inconsistent experiment configurations.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SweepVariable { W, K, M };

struct ExperimentConfig {
  std::string profile = "paper";
  ScenarioConfig scenario;
  SweepVariable sweepVariable = SweepVariable::W;
  /// W values are in MHz; K and M values are counts.
  std::vector<double> sweepValues;
  int layouts = 5;
  int realizationsPerLayout = 20;
  std::vector<Scheme> schemes;
  BenchmarkOptions solver;
  std::uint64_t seed = 1;
  int jobs = 1;
  /// When false the runtime column is written as 0 so that repeated runs are
  /// byte-identical.
  bool recordRuntime = true;

  /// Instance configuration for one sweep value.
  ScenarioConfig scenarioFor(double sweepValue) const;
};

/// Parses a JSON configuration. Absent fields take the reference defaults,
/// then the profile ("paper" or "desk"; `profileOverride` wins over the file)
/// is applied, then explicit fields. Throws ConfigError.
ExperimentConfig validateConfig(const std::string& text, const std::optional<std::string>& profileOverride = {});

/// Seed of run r on layout l: a splitmix64 mix of (base, l, r). r = -1 gives
/// the layout seed.
std::uint64_t runSeed(std::uint64_t base, int layout, int realization);

struct RunRecord {
  double sweepValue = 0.0;
  Scheme scheme = Scheme::proposedGreedy;
  int layout = 0;
  int realization = 0;
  std::uint64_t layoutSeed = 0;
  std::uint64_t fadingSeed = 0;
  bool ok = true;
  std::string error;
  double wsr = 0.0;        // bit/s
  double dualValue = 0.0;  // bit/s
  double runtimeS = 0.0;
};

struct ResultRow {
  double sweepValue = 0.0;
  std::string scheme;
  double meanWsrMbps = 0.0;
  double stdWsrMbps = 0.0;
  double meanDualGap = 0.0;  // mean of (dual - wsr) / dual
  double meanRuntimeS = 0.0;
  int nRuns = 0;

  bool operator==(const ResultRow&) const = default;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<RunRecord> runs;
  int failures = 0;
};

ExperimentResult runExperiment(const ExperimentConfig& cfg);

/// Aggregates per-run records into rows ordered by sweep value, then scheme
/// order in `schemes`.
std::vector<ResultRow> aggregate(const std::vector<RunRecord>& runs, const std::vector<double>& sweepValues,
                                 const std::vector<Scheme>& schemes);

std::string resultsToCsv(const std::vector<ResultRow>& rows);
std::string resultsToJson(const std::vector<ResultRow>& rows);
std::vector<ResultRow> resultsFromJson(const std::string& text);
std::string runsToCsv(const std::vector<RunRecord>& runs);

/// Writes rows as "csv" or "json". Throws std::runtime_error naming the path
/// on I/O failure and std::invalid_argument on an unknown format.
void emitResults(const std::vector<ResultRow>& rows, const std::string& format, const std::string& path);

}  // namespace udcran
