#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "udcran/benchmarks.hpp"
#include "udcran/channel.hpp"
#include "udcran/experiment.hpp"
#include "udcran/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw udcran::ConfigError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  if (!out) throw std::runtime_error("failed writing " + path);
}

struct SolveArgs {
  std::string config;
  std::vector<std::string> schemes;
  std::string profile;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string runsOut;
  bool noTiming = false;
};

int runSolve(const SolveArgs& a) {
  udcran::ExperimentConfig cfg;
  try {
    const std::string text = a.config.empty() ? std::string() : readFile(a.config);
    std::optional<std::string> profile;
    if (!a.profile.empty()) profile = a.profile;
    cfg = udcran::validateConfig(text, profile);
    if (!a.schemes.empty()) {
      cfg.schemes.clear();
      for (const auto& tag : a.schemes) cfg.schemes.push_back(udcran::parseScheme(tag));
      // Re-check scheme-dependent limits with the overridden list.
      for (double v : cfg.sweepValues) {
        const int M = cfg.scenarioFor(v).dims.rrhs;
        for (auto s : cfg.schemes) {
          if ((s == udcran::Scheme::proposedExhaustive || s == udcran::Scheme::equalPower) &&
              M > udcran::kMaxExhaustiveRrhs) {
            throw udcran::ConfigError("M = " + std::to_string(M) +
                                      " is too large for exhaustive RRH search; use proposed-greedy instead");
          }
        }
      }
    }
    if (a.seed) cfg.seed = *a.seed;
    if (a.jobs) {
      if (*a.jobs < 1) throw udcran::ConfigError("--jobs must be >= 1");
      cfg.jobs = *a.jobs;
    }
    if (a.noTiming) cfg.recordRuntime = false;
    if (a.format != "csv" && a.format != "json") throw udcran::ConfigError("--format must be csv or json");
  } catch (const udcran::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  const udcran::ExperimentResult result = udcran::runExperiment(cfg);
  try {
    if (a.out.empty()) {
      std::cout << (a.format == "csv" ? udcran::resultsToCsv(result.rows) : udcran::resultsToJson(result.rows));
    } else {
      udcran::emitResults(result.rows, a.format, a.out);
    }
    if (!a.runsOut.empty()) writeFile(a.runsOut, udcran::runsToCsv(result.runs));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  if (result.failures > 0) {
    for (const auto& r : result.runs) {
      if (!r.ok) {
        std::cerr << "solver failure: " << udcran::toString(r.scheme) << " at " << r.sweepValue << " (layout "
                  << r.layout << ", realization " << r.realization << "): " << r.error << '\n';
      }
    }
    return kExitSolver;
  }
  return kExitOk;
}

struct OracleArgs {
  int rrhs = 2;
  int users = 2;
  int subcarriers = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int runOracle(const OracleArgs& a) {
  const udcran::oracle::TinyInstanceSpec spec{a.rrhs, a.users, a.subcarriers};
  if (udcran::oracle::assignmentCount(spec) > udcran::oracle::kMaxAssignments) {
    std::cerr << "config error: instance too large for brute force\n";
    return kExitConfig;
  }
  try {
    const auto inst = udcran::oracle::tinyInstance(spec, a.seed);
    const auto bf = udcran::oracle::bruteForceWsr(inst);
    nlohmann::json j;
    j["instance"] = nlohmann::json::parse(udcran::instanceToJson(inst));
    j["brute_force_wsr_bps"] = bf.wsr;
    j["assignment_dual_bound_bps"] = bf.assignmentDualBound;
    j["assignments"] = bf.assignments;
    j["assignments_solved"] = bf.evaluated;
    const std::string body = j.dump(2) + "\n";
    if (a.out.empty()) {
      std::cout << body;
    } else {
      writeFile(a.out, body);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UD-CRAN fronthaul and OFDMA resource allocation"};
  app.require_subcommand(1);

  SolveArgs solveArgs;
  auto* solve = app.add_subcommand("solve", "Run a Monte-Carlo sweep and write the result table");
  solve->add_option("--config", solveArgs.config, "JSON experiment config (defaults when omitted)");
  solve->add_option("--scheme", solveArgs.schemes,
                    "Scheme tag(s): proposed-exhaustive, proposed-greedy, single-rrh, equal-power, conventional")
      ->delimiter(',');
  solve->add_option("--profile", solveArgs.profile, "desk or paper");
  solve->add_option("--out", solveArgs.out, "Output path (stdout when omitted)");
  solve->add_option("--format", solveArgs.format, "csv or json");
  solve->add_option("--seed", solveArgs.seed, "Base seed");
  solve->add_option("--jobs", solveArgs.jobs, "Worker threads");
  solve->add_option("--runs-out", solveArgs.runsOut, "Per-run log (CSV)");
  solve->add_flag("--no-timing", solveArgs.noTiming, "Write 0 in the runtime column");

  OracleArgs oracleArgs;
  auto* oracle = app.add_subcommand("oracle", "Brute-force reference value for a tiny random instance");
  oracle->add_option("--rrhs,-M", oracleArgs.rrhs, "RRHs");
  oracle->add_option("--users,-K", oracleArgs.users, "Users");
  oracle->add_option("--subcarriers,-N", oracleArgs.subcarriers, "Subcarriers");
  oracle->add_option("--seed", oracleArgs.seed, "Instance seed");
  oracle->add_option("--out", oracleArgs.out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  if (*solve) return runSolve(solveArgs);
  return runOracle(oracleArgs);
}
