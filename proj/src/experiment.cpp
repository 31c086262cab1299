#include "udcran/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace udcran {

using nlohmann::json;

namespace {

const std::vector<double> kPaperWSweepMhz{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
const std::vector<double> kDeskWSweepMhz{10, 20, 30, 50, 70, 100, 150, 200, 250};

std::string sweepName(SweepVariable v) {
  switch (v) {
    case SweepVariable::W: return "W";
    case SweepVariable::K: return "K";
    case SweepVariable::M: return "M";
  }
  return "?";
}

/// Reads an object, rejecting keys it does not know about.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void applyProfile(ExperimentConfig& cfg, const std::string& profile) {
  if (profile == "paper") {
    cfg.layouts = 5;
    cfg.realizationsPerLayout = 20;
    cfg.scenario.dims.subcarriers = 128;
    cfg.sweepValues = kPaperWSweepMhz;
  } else if (profile == "desk") {
    cfg.layouts = 2;
    cfg.realizationsPerLayout = 5;
    cfg.scenario.dims.subcarriers = 64;
    cfg.sweepValues = kDeskWSweepMhz;
  } else {
    throw ConfigError("unknown profile '" + profile + "' (expected paper or desk)");
  }
  cfg.profile = profile;
}

json parseText(const std::string& text) {
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
  if (blank) return json::object();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": " + e.what());
  }
}

bool isCount(double v) { return v >= 1 && std::floor(v) == v && v <= 1e6; }

}  // namespace

ScenarioConfig ExperimentConfig::scenarioFor(double sweepValue) const {
  ScenarioConfig s = scenario;
  switch (sweepVariable) {
    case SweepVariable::W: s.fronthaul.bandwidthHz = sweepValue * 1e6; break;
    case SweepVariable::K: s.dims.users = static_cast<int>(sweepValue); break;
    case SweepVariable::M: s.dims.rrhs = static_cast<int>(sweepValue); break;
  }
  s.dims.fronthaulBandwidthHz = s.fronthaul.bandwidthHz;
  return s;
}

ExperimentConfig validateConfig(const std::string& text, const std::optional<std::string>& profileOverride) {
  const json root = parseText(text);
  ExperimentConfig cfg;
  cfg.scenario.dims.rrhs = 6;
  cfg.scenario.dims.users = 8;
  cfg.schemes = allSchemes();

  ObjectReader top(root, "config");
  std::string profile = "paper";
  top.read("profile", profile);
  if (profileOverride) profile = *profileOverride;
  applyProfile(cfg, profile);

  auto& dims = cfg.scenario.dims;
  if (const json* j = top.child("system")) {
    ObjectReader r(*j, "system");
    r.read("M", dims.rrhs);
    r.read("K", dims.users);
    r.read("N", dims.subcarriers);
    double bMhz = dims.accessBandwidthHz / 1e6;
    r.read("B_mhz", bMhz);
    dims.accessBandwidthHz = bMhz * 1e6;
    r.read("max_power_dbm", cfg.scenario.maxPowerDbm);
    r.finish();
  }
  if (const json* j = top.child("layout")) {
    ObjectReader r(*j, "layout");
    r.read("cluster_radius_m", cfg.scenario.layout.clusterRadius);
    r.read("cp_distance_m", cfg.scenario.layout.cpDistance);
    r.finish();
  }
  if (const json* j = top.child("fading")) {
    auto& f = cfg.scenario.fading;
    ObjectReader r(*j, "fading");
    r.read("shadowing_std_db", f.shadowingStdDb);
    r.read("pdp_taps", f.pdpTaps);
    r.read("pdp_decay_fraction", f.pdpDecayFraction);
    r.read("path_loss_intercept_db", f.pathLossInterceptDb);
    r.read("path_loss_slope_db", f.pathLossSlopeDb);
    r.read("rrh_antenna_gain_db", f.rrhAntennaGainDb);
    r.read("noise_density_dbm_hz", f.noiseDensityDbmHz);
    r.read("noise_figure_db", f.noiseFigureDb);
    r.read("min_distance_m", f.minDistance);
    r.finish();
  }
  if (const json* j = top.child("fronthaul")) {
    auto& f = cfg.scenario.fronthaul;
    ObjectReader r(*j, "fronthaul");
    double wMhz = f.bandwidthHz / 1e6;
    r.read("W_mhz", wMhz);
    f.bandwidthHz = wMhz * 1e6;
    r.read("cp_tx_power_dbm", f.cpTxPowerDbm);
    r.read("cp_antenna_gain_db", f.cpAntennaGainDb);
    r.read("rrh_antenna_gain_db", f.rrhAntennaGainDb);
    r.read("noise_density_dbm_hz", f.noiseDensityDbmHz);
    r.read("noise_figure_db", f.noiseFigureDb);
    r.finish();
  }
  if (const json* j = top.child("sweep")) {
    ObjectReader r(*j, "sweep");
    std::string variable = "W";
    r.read("variable", variable);
    if (variable == "W") {
      cfg.sweepVariable = SweepVariable::W;
    } else if (variable == "K") {
      cfg.sweepVariable = SweepVariable::K;
    } else if (variable == "M") {
      cfg.sweepVariable = SweepVariable::M;
    } else {
      throw ConfigError("sweep.variable must be W, K or M (got '" + variable + "')");
    }
    if (cfg.sweepVariable != SweepVariable::W && !j->contains("values")) {
      throw ConfigError("sweep.values is required when sweeping " + variable);
    }
    r.read("values", cfg.sweepValues);
    r.finish();
  }
  top.read("layouts", cfg.layouts);
  top.read("realizations_per_layout", cfg.realizationsPerLayout);
  if (const json* j = top.child("schemes")) {
    if (!j->is_array()) throw ConfigError("schemes: expected an array of scheme tags");
    cfg.schemes.clear();
    for (const auto& tag : *j) {
      try {
        cfg.schemes.push_back(parseScheme(tag.get<std::string>()));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("schemes: ") + e.what());
      }
    }
  }
  if (const json* j = top.child("solver")) {
    auto& so = cfg.solver;
    ObjectReader r(*j, "solver");
    r.read("max_iterations", so.solver.ellipsoid.maxIterations);
    r.read("relative_tolerance", so.solver.ellipsoid.relativeTolerance);
    std::string recovery = "reoptimize";
    r.read("primal_recovery", recovery);
    if (recovery == "repair") {
      so.solver.recovery = PrimalRecovery::repair;
    } else if (recovery == "reoptimize") {
      so.solver.recovery = PrimalRecovery::repairThenReoptimize;
    } else {
      throw ConfigError("solver.primal_recovery must be repair or reoptimize");
    }
    r.read("reoptimize_candidates", so.solver.reoptimizeCandidates);
    r.read("polish_max_pairs", so.solver.polishMaxPairs);
    r.read("charge_equal_power_cost", so.solver.search.chargeEqualPowerCost);
    r.read("bisection_tolerance", so.bisectionTolerance);
    r.finish();
  }
  top.read("seed", cfg.seed);
  top.read("jobs", cfg.jobs);
  top.read("record_runtime", cfg.recordRuntime);
  top.finish();

  // Domain checks.
  if (cfg.sweepValues.empty()) throw ConfigError("sweep.values must not be empty");
  if (cfg.layouts < 1) throw ConfigError("layouts must be >= 1");
  if (cfg.realizationsPerLayout < 1) throw ConfigError("realizations_per_layout must be >= 1");
  if (cfg.schemes.empty()) throw ConfigError("schemes must not be empty");
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.solver.solver.ellipsoid.maxIterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  if (!(cfg.solver.solver.ellipsoid.relativeTolerance > 0)) throw ConfigError("solver.relative_tolerance must be > 0");
  if (cfg.solver.solver.reoptimizeCandidates < 0) throw ConfigError("solver.reoptimize_candidates must be >= 0");
  if (cfg.solver.solver.polishMaxPairs < 0) throw ConfigError("solver.polish_max_pairs must be >= 0");
  for (double v : cfg.sweepValues) {
    if (cfg.sweepVariable == SweepVariable::W ? !(v > 0) : !isCount(v)) {
      throw ConfigError("sweep value " + std::to_string(v) + " is not valid for " + sweepName(cfg.sweepVariable));
    }
  }
  try {
    cfg.scenario.layout.validate();
    cfg.scenario.fading.validate();
    for (double v : cfg.sweepValues) {
      ScenarioConfig s = cfg.scenarioFor(v);
      s.fronthaul.validate();
      s.dims.validate();
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool exhaustive =
      std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::proposedExhaustive) != cfg.schemes.end() ||
      std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::equalPower) != cfg.schemes.end();
  if (exhaustive) {
    for (double v : cfg.sweepValues) {
      const int M = cfg.scenarioFor(v).dims.rrhs;
      if (M > kMaxExhaustiveRrhs) {
        throw ConfigError("M = " + std::to_string(M) + " is too large for exhaustive RRH search (limit " +
                          std::to_string(kMaxExhaustiveRrhs) + "); use proposed-greedy instead");
      }
    }
  }
  return cfg;
}

std::uint64_t runSeed(std::uint64_t base, int layout, int realization) {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = splitmix(base);
  h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(layout)));
  h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(realization)));
  return h;
}

ExperimentResult runExperiment(const ExperimentConfig& cfg) {
  struct Task {
    int sweepIndex;
    int layout;
    int realization;
  };
  std::vector<Task> tasks;
  for (int s = 0; s < static_cast<int>(cfg.sweepValues.size()); ++s) {
    for (int l = 0; l < cfg.layouts; ++l) {
      for (int r = 0; r < cfg.realizationsPerLayout; ++r) tasks.push_back({s, l, r});
    }
  }
  const std::size_t perTask = cfg.schemes.size();
  std::vector<RunRecord> runs(tasks.size() * perTask);

  auto work = [&](std::size_t t) {
    const Task& task = tasks[t];
    const double value = cfg.sweepValues[task.sweepIndex];
    ScenarioConfig scenario = cfg.scenarioFor(value);
    scenario.layout.layoutSeed = runSeed(cfg.seed, task.layout, -1);
    scenario.layout.fadingSeed = runSeed(cfg.seed, task.layout, task.realization);
    std::optional<NetworkInstance> inst;
    std::string instanceError;
    try {
      inst.emplace(generateInstance(scenario));
    } catch (const std::exception& e) {
      instanceError = e.what();
    }
    for (std::size_t s = 0; s < perTask; ++s) {
      RunRecord& rec = runs[t * perTask + s];
      rec.sweepValue = value;
      rec.scheme = cfg.schemes[s];
      rec.layout = task.layout;
      rec.realization = task.realization;
      rec.layoutSeed = scenario.layout.layoutSeed;
      rec.fadingSeed = scenario.layout.fadingSeed;
      if (!inst) {
        rec.ok = false;
        rec.error = instanceError;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        const SolveReport report = solveScheme(*inst, cfg.schemes[s], cfg.solver);
        rec.wsr = report.wsr;
        rec.dualValue = report.dualValue;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
      }
      if (cfg.recordRuntime) {
        rec.runtimeS = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
    }
  };

  const int workers = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) work(t);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.runs = std::move(runs);
  for (const auto& r : result.runs) result.failures += r.ok ? 0 : 1;
  result.rows = aggregate(result.runs, cfg.sweepValues, cfg.schemes);
  return result;
}

std::vector<ResultRow> aggregate(const std::vector<RunRecord>& runs, const std::vector<double>& sweepValues,
                                 const std::vector<Scheme>& schemes) {
  std::vector<ResultRow> rows;
  for (double v : sweepValues) {
    for (Scheme scheme : schemes) {
      ResultRow row;
      row.sweepValue = v;
      row.scheme = std::string(toString(scheme));
      std::vector<double> wsr;
      double gapSum = 0.0;
      double runtimeSum = 0.0;
      for (const RunRecord& r : runs) {
        if (!r.ok || r.scheme != scheme || r.sweepValue != v) continue;
        wsr.push_back(r.wsr / 1e6);
        gapSum += r.dualValue > 0 ? (r.dualValue - r.wsr) / r.dualValue : 0.0;
        runtimeSum += r.runtimeS;
      }
      row.nRuns = static_cast<int>(wsr.size());
      if (row.nRuns > 0) {
        double sum = 0.0;
        for (double x : wsr) sum += x;
        row.meanWsrMbps = sum / row.nRuns;
        if (row.nRuns > 1) {
          double ss = 0.0;
          for (double x : wsr) ss += (x - row.meanWsrMbps) * (x - row.meanWsrMbps);
          row.stdWsrMbps = std::sqrt(ss / (row.nRuns - 1));
        }
        row.meanDualGap = gapSum / row.nRuns;
        row.meanRuntimeS = runtimeSum / row.nRuns;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::string resultsToCsv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "# sweep_value: MHz for W sweeps, count for K/M sweeps; wsr in Mbps; dual gap relative to the dual value; "
         "runtime in seconds\n";
  out << "sweep_value,scheme,mean_wsr_mbps,std_wsr_mbps,mean_dual_gap,mean_runtime_s,n_runs\n";
  for (const auto& r : rows) {
    out << num(r.sweepValue) << ',' << r.scheme << ',' << num(r.meanWsrMbps) << ',' << num(r.stdWsrMbps) << ','
        << num(r.meanDualGap) << ',' << num(r.meanRuntimeS) << ',' << r.nRuns << '\n';
  }
  return out.str();
}

std::string resultsToJson(const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"sweep_value", r.sweepValue},
                   {"scheme", r.scheme},
                   {"mean_wsr_mbps", r.meanWsrMbps},
                   {"std_wsr_mbps", r.stdWsrMbps},
                   {"mean_dual_gap", r.meanDualGap},
                   {"mean_runtime_s", r.meanRuntimeS},
                   {"n_runs", r.nRuns}});
  }
  json j = {{"units", {{"wsr", "Mbps"}, {"runtime", "s"}, {"dual_gap", "relative"}}}, {"rows", arr}};
  return j.dump(2) + "\n";
}

std::vector<ResultRow> resultsFromJson(const std::string& text) {
  const json j = json::parse(text);
  std::vector<ResultRow> rows;
  for (const auto& e : j.at("rows")) {
    ResultRow r;
    r.sweepValue = e.at("sweep_value").get<double>();
    r.scheme = e.at("scheme").get<std::string>();
    r.meanWsrMbps = e.at("mean_wsr_mbps").get<double>();
    r.stdWsrMbps = e.at("std_wsr_mbps").get<double>();
    r.meanDualGap = e.at("mean_dual_gap").get<double>();
    r.meanRuntimeS = e.at("mean_runtime_s").get<double>();
    r.nRuns = e.at("n_runs").get<int>();
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string runsToCsv(const std::vector<RunRecord>& runs) {
  std::ostringstream out;
  out << "sweep_value,scheme,layout,realization,layout_seed,fading_seed,ok,wsr_bps,dual_bps,runtime_s,error\n";
  for (const auto& r : runs) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << num(r.sweepValue) << ',' << toString(r.scheme) << ',' << r.layout << ',' << r.realization << ','
        << r.layoutSeed << ',' << r.fadingSeed << ',' << (r.ok ? 1 : 0) << ',' << num(r.wsr) << ','
        << num(r.dualValue) << ',' << num(r.runtimeS) << ',' << err << '\n';
  }
  return out.str();
}

void emitResults(const std::vector<ResultRow>& rows, const std::string& format, const std::string& path) {
  std::string body;
  if (format == "csv") {
    body = resultsToCsv(rows);
  } else if (format == "json") {
    body = resultsToJson(rows);
  } else {
    throw std::invalid_argument("unknown output format '" + format + "' (expected csv or json)");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace udcran
