#pragma once

// Scenario x scheduler x seed benchmark grid.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "hcsim/engine.hpp"
#include "hcsim/metrics.hpp"
#include "hcsim/model.hpp"
#include "hcsim/scheduler.hpp"
#include "hcsim/workload.hpp"

namespace hcsim {

struct BenchPlan {
  std::vector<std::string> scenarios{"low", "medium", "high"};
  std::vector<SchedulingMethod> schedulers{std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  SimConfig config = default_preset();
  unsigned jobs = 1;
};

struct BenchCellError {
  std::string scenario;
  std::string scheduler;
  std::uint64_t seed = 0;
  std::string message;
};

struct BenchResult {
  std::vector<SimReport> reports;  // sorted by (scenario, scheduler, seed)
  std::vector<BenchCellError> errors;
};

inline std::optional<std::string> validate_plan(const BenchPlan& plan) {
  if (plan.scenarios.empty()) return "bench plan has no scenarios";
  if (plan.schedulers.empty()) return "bench plan has no schedulers";
  if (plan.seeds.empty()) return "bench plan has no seeds";
  for (const auto& s : plan.scenarios)
    if (!scenario_by_name(s)) return "unknown scenario '" + s + "'";
  return std::nullopt;
}

inline std::size_t scenario_rank(const std::string& name) {
  for (std::size_t i = 0; i < kScenarioNames.size(); ++i)
    if (kScenarioNames[i] == name) return i;
  return kScenarioNames.size();
}

inline std::size_t method_rank(SchedulingMethod m) { return static_cast<std::size_t>(m); }

/// One cell: generate the workload, simulate, build the report and check the
/// energy ledger.
inline SimReport run_cell(const SimConfig& config, const std::string& scenario,
                          SchedulingMethod method, std::uint64_t seed) {
  const auto spec = scenario_by_name(scenario).value();
  auto workload = generate_workload(spec, config.task_types(), seed);
  const auto cfg = config.with_method(method);
  auto scheduler = make_scheduler(method, cfg);
  const auto trace = run_simulation(cfg, std::move(workload), *scheduler);
  const auto ledger = compute_ledger(trace, cfg);
  if (auto err = check_ledger(ledger, trace.horizon))
    throw ContractViolation("energy ledger: " + *err);
  return compute_report(trace, cfg, scenario, std::string(to_string(method)), seed);
}

inline BenchResult run_bench(const BenchPlan& plan) {
  struct Cell {
    std::string scenario;
    SchedulingMethod method;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (const auto& s : plan.scenarios)
    for (auto m : plan.schedulers)
      for (auto seed : plan.seeds) cells.push_back({s, m, seed});

  std::vector<std::optional<SimReport>> out(cells.size());
  std::vector<std::optional<std::string>> failures(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_cell(plan.config, cells[i].scenario, cells[i].method, cells[i].seed);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(plan.jobs, static_cast<unsigned>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<std::size_t> order(cells.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(scenario_rank(cells[a].scenario), method_rank(cells[a].method),
                           cells[a].seed) < std::make_tuple(scenario_rank(cells[b].scenario),
                                                            method_rank(cells[b].method),
                                                            cells[b].seed);
  });
  BenchResult result;
  for (auto i : order) {
    if (out[i])
      result.reports.push_back(std::move(*out[i]));
    else
      result.errors.push_back({cells[i].scenario, std::string(to_string(cells[i].method)),
                               cells[i].seed, failures[i].value_or("unknown failure")});
  }
  return result;
}

/// Per-(scenario, scheduler) means over seeds.
struct SummaryCell {
  std::string scenario;
  std::string scheduler;
  std::size_t runs = 0;
  double completion_pct = 0.0;
  double total_energy_mj = 0.0;
  double active_energy_mj = 0.0;
  double idle_energy_mj = 0.0;
  double wasted_energy_mj = 0.0;
  /// Mean over runs with at least one completion.
  std::optional<double> energy_per_completion_mj;
};

inline std::vector<SummaryCell> summarize(const std::vector<SimReport>& reports) {
  std::vector<SummaryCell> cells;
  std::vector<std::size_t> epc_runs;
  for (const auto& r : reports) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const SummaryCell& c) {
      return c.scenario == r.scenario && c.scheduler == r.scheduler;
    });
    if (it == cells.end()) {
      SummaryCell fresh;
      fresh.scenario = r.scenario;
      fresh.scheduler = r.scheduler;
      cells.push_back(std::move(fresh));
      epc_runs.push_back(0);
      it = cells.end() - 1;
    }
    const auto k = static_cast<std::size_t>(it - cells.begin());
    ++it->runs;
    it->completion_pct += r.completion_pct();
    it->total_energy_mj += static_cast<double>(r.total_energy) / 1000.0;
    it->active_energy_mj += static_cast<double>(r.active_energy) / 1000.0;
    it->idle_energy_mj += static_cast<double>(r.idle_energy) / 1000.0;
    it->wasted_energy_mj += static_cast<double>(r.wasted_energy) / 1000.0;
    if (r.completed > 0) {
      it->energy_per_completion_mj =
          it->energy_per_completion_mj.value_or(0.0) +
          static_cast<double>(r.total_energy) / static_cast<double>(r.completed) / 1000.0;
      ++epc_runs[k];
    }
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto& c = cells[k];
    const auto n = static_cast<double>(c.runs);
    c.completion_pct /= n;
    c.total_energy_mj /= n;
    c.active_energy_mj /= n;
    c.idle_energy_mj /= n;
    c.wasted_energy_mj /= n;
    if (c.energy_per_completion_mj) *c.energy_per_completion_mj /= static_cast<double>(epc_runs[k]);
  }
  return cells;
}

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

inline std::string render_runs_csv(const BenchResult& result, const SimConfig& config) {
  std::string out = report_csv_header(config) + '\n';
  for (const auto& r : result.reports) out += report_csv_row(r) + '\n';
  return out;
}

inline std::string render_summary_csv(const std::vector<SummaryCell>& summary) {
  std::string out =
      "scenario,scheduler,runs,completion_pct,total_energy_mJ,active_energy_mJ,idle_energy_mJ,"
      "wasted_energy_mJ,energy_per_completion_mJ\n";
  for (const auto& c : summary) {
    out += c.scenario + ',' + c.scheduler + ',' + std::to_string(c.runs) + ',' +
           detail::fixed(c.completion_pct, 2) + ',' + detail::fixed(c.total_energy_mj, 3) + ',' +
           detail::fixed(c.active_energy_mj, 3) + ',' + detail::fixed(c.idle_energy_mj, 3) + ',' +
           detail::fixed(c.wasted_energy_mj, 3) + ',' +
           (c.energy_per_completion_mj ? detail::fixed(*c.energy_per_completion_mj, 3) : "") +
           '\n';
  }
  return out;
}

enum class PlotMetric { CompletionPct, TotalEnergy, WastedEnergy, EnergyPerCompletion };

/// Scenario rows x scheduler columns, mirroring one bar chart.
inline std::string render_plot_csv(const std::vector<SummaryCell>& summary, const BenchPlan& plan,
                                   PlotMetric metric) {
  std::vector<SchedulingMethod> methods = plan.schedulers;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  std::vector<std::string> scenarios = plan.scenarios;
  std::sort(scenarios.begin(), scenarios.end(),
            [](const auto& a, const auto& b) { return scenario_rank(a) < scenario_rank(b); });
  scenarios.erase(std::unique(scenarios.begin(), scenarios.end()), scenarios.end());

  std::string out = "scenario";
  for (auto m : methods) out += ',' + std::string(to_string(m));
  out += '\n';
  for (const auto& s : scenarios) {
    out += s;
    for (auto m : methods) {
      out += ',';
      auto it = std::find_if(summary.begin(), summary.end(), [&](const SummaryCell& c) {
        return c.scenario == s && c.scheduler == to_string(m);
      });
      if (it == summary.end()) continue;
      switch (metric) {
        case PlotMetric::CompletionPct: out += detail::fixed(it->completion_pct, 2); break;
        case PlotMetric::TotalEnergy: out += detail::fixed(it->total_energy_mj, 3); break;
        case PlotMetric::WastedEnergy: out += detail::fixed(it->wasted_energy_mj, 3); break;
        case PlotMetric::EnergyPerCompletion:
          if (it->energy_per_completion_mj) out += detail::fixed(*it->energy_per_completion_mj, 3);
          break;
      }
    }
    out += '\n';
  }
  return out;
}

inline constexpr std::pair<PlotMetric, const char*> kPlotFiles[] = {
    {PlotMetric::CompletionPct, "completion_pct.csv"},
    {PlotMetric::TotalEnergy, "total_energy.csv"},
    {PlotMetric::WastedEnergy, "wasted_energy.csv"},
    {PlotMetric::EnergyPerCompletion, "energy_per_completion.csv"},
};

/// Writes runs.csv, summary.csv and the four plot files into `dir`.
inline std::vector<std::filesystem::path> write_bench_outputs(const BenchResult& result,
                                                              const BenchPlan& plan,
                                                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto summary = summarize(result.reports);
  std::vector<std::pair<std::filesystem::path, std::string>> files{
      {dir / "runs.csv", render_runs_csv(result, plan.config)},
      {dir / "summary.csv", render_summary_csv(summary)},
  };
  for (const auto& [metric, name] : kPlotFiles)
    files.emplace_back(dir / name, render_plot_csv(summary, plan, metric));

  std::vector<std::filesystem::path> written;
  for (const auto& [path, content] : files) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    written.push_back(path);
  }
  return written;
}

}  // namespace hcsim
