#pragma once

// Subcommand bodies for the hcsim tool. Argument parsing lives in
// tools/hcsim.cpp; these functions take already-parsed options so they can
// be driven from tests.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "hcsim/bench.hpp"
#include "hcsim/engine.hpp"
#include "hcsim/metrics.hpp"
#include "hcsim/model.hpp"
#include "hcsim/scheduler.hpp"
#include "hcsim/workload.hpp"

namespace hcsim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kContractViolation = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  if (!f) throw IoError("cannot write " + path.string());
}

/// Config from a file, or the built-in preset when no path is given.
inline SimConfig load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) return default_preset();
  try {
    return parse_config(read_file(*path));
  } catch (const ConfigError& e) {
    throw ConfigError(path->string() + ": " + e.what());
  }
}

inline std::string valid_scenarios() { return "low, medium, high"; }

inline ScenarioSpec require_scenario(const std::string& name) {
  auto s = scenario_by_name(name);
  if (!s) throw UsageError("unknown scenario '" + name + "' (valid: " + valid_scenarios() + ")");
  return *s;
}

inline SchedulingMethod require_method(const std::string& name) {
  auto m = parse_method(name);
  if (!m) throw UsageError("unknown scheduler '" + name + "' (valid: FCFS, FCFS-NQ, MECT, MEET)");
  return *m;
}

/// Maps exceptions to exit codes and prints the diagnostic.
template <typename Fn>
int guarded(Fn&& fn, std::ostream& err = std::cerr) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "contract violation: " << e.what() << '\n';
    return kContractViolation;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kDataError;
  } catch (const WorkloadError& e) {
    err << "workload error: " << e.what() << '\n';
    return kDataError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kContractViolation;
  }
}

struct GenWorkloadOptions {
  std::string scenario;
  std::uint64_t seed = 0;
  std::filesystem::path out;
  std::optional<std::filesystem::path> config;
};

inline int cmd_gen_workload(const GenWorkloadOptions& opt, std::ostream& log = std::cout) {
  const auto spec = require_scenario(opt.scenario);
  const auto config = load_config(opt.config);
  const auto tasks = generate_workload(spec, config.task_types(), opt.seed);
  write_file(opt.out, write_workload_csv(tasks, config));
  std::vector<std::size_t> counts(config.task_types().size(), 0);
  for (const auto& t : tasks) ++counts[static_cast<std::size_t>(t.task_type - 1)];
  log << opt.out.string() << ": " << tasks.size() << " tasks";
  for (const auto& t : config.task_types())
    log << ", " << t.name << "=" << counts[static_cast<std::size_t>(t.id - 1)];
  log << '\n';
  return kOk;
}

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path workload;
  std::optional<std::string> scheduler;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> trace;
  std::optional<std::string> scenario;
  std::uint64_t seed = 0;
};

/// Scenario label for a report: explicit, else the workload's parent
/// directory when it names a scenario, else "custom".
inline std::string scenario_label(const SimulateOptions& opt) {
  if (opt.scenario) return *opt.scenario;
  const auto parent = opt.workload.parent_path().filename().string();
  if (scenario_by_name(parent)) return parent;
  return "custom";
}

inline int cmd_simulate(const SimulateOptions& opt, std::ostream& log = std::cout) {
  auto config = load_config(opt.config);
  if (opt.scheduler) config = config.with_method(require_method(*opt.scheduler));
  WorkloadReadResult workload;
  try {
    workload = read_workload_csv(read_file(opt.workload), config);
  } catch (const WorkloadError& e) {
    throw WorkloadError(opt.workload.string() + ": " + e.what());
  }
  for (const auto& w : workload.warnings) std::cerr << "warning: " << opt.workload.string() << ": " << w << '\n';

  auto scheduler = make_scheduler(config.scheduling_method(), config);
  SimOptions sim_opt;
  sim_opt.record_events = opt.trace.has_value();
  const auto trace = run_simulation(config, std::move(workload.tasks), *scheduler, sim_opt);
  if (auto err = check_ledger(compute_ledger(trace, config), trace.horizon))
    throw ContractViolation("energy ledger: " + *err);
  const auto report = compute_report(trace, config, scenario_label(opt),
                                     std::string(to_string(config.scheduling_method())), opt.seed);

  if (opt.trace) {
    std::string dump = "time_us,class,task_seq,machine_index,action\n";
    for (const auto& line : trace.event_log) dump += line + '\n';
    write_file(*opt.trace, dump);
  }
  if (opt.out) {
    const auto format = opt.out->extension() == ".csv" ? ReportFormat::Csv : ReportFormat::Json;
    write_file(*opt.out, write_report(report, format, config));
  } else {
    log << write_report(report, ReportFormat::Json, config);
  }
  log << report.scheduler << ": " << report.completed << "/" << report.total_tasks
      << " completed (" << format_pct(report.completed, report.total_tasks) << "%), total energy "
      << format_mj(report.total_energy) << " mJ\n";
  return kOk;
}

struct BenchOptions {
  BenchPlan plan;
  std::filesystem::path out = "bench-out";
};

inline int cmd_bench(const BenchOptions& opt, std::ostream& log = std::cout) {
  if (auto err = validate_plan(opt.plan)) throw UsageError(*err);
  const auto result = run_bench(opt.plan);
  std::error_code ec;
  std::filesystem::create_directories(opt.out, ec);
  if (ec) throw IoError("cannot create " + opt.out.string() + ": " + ec.message());
  const auto files = write_bench_outputs(result, opt.plan, opt.out);
  log << result.reports.size() << " runs";
  if (!result.errors.empty()) log << ", " << result.errors.size() << " failed";
  log << '\n';
  for (const auto& f : files) log << "  wrote " << f.string() << '\n';
  for (const auto& e : result.errors)
    std::cerr << "cell " << e.scenario << "/" << e.scheduler << "/seed " << e.seed
              << " failed: " << e.message << '\n';
  return result.errors.empty() ? kOk : kContractViolation;
}

/// Parses a seed list: comma-separated values and inclusive ranges "a..b".
inline std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  auto to_u64 = [&](const std::string& s) -> std::uint64_t {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      throw UsageError("bad seed '" + s + "'");
    }
    if (used != s.size()) throw UsageError("bad seed '" + s + "'");
    return v;
  };
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(to_u64(part));
      continue;
    }
    const auto lo = to_u64(part.substr(0, dots));
    const auto hi = to_u64(part.substr(dots + 2));
    if (hi < lo) throw UsageError("empty seed range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw UsageError("no seeds given");
  return seeds;
}

}  // namespace hcsim::cli
