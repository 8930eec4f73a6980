#pragma once

// Energy ledger and per-run report.
//
// All energy is integer microjoules. Rounding happens only when a value is
// formatted for output.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hcsim/engine.hpp"
#include "hcsim/model.hpp"

namespace hcsim {

struct MachineEnergy {
  std::size_t index = 0;
  std::string type_name;
  Micros busy = 0;
  Microjoules active = 0;     // power x busy time
  Microjoules idle = 0;       // idle power x (horizon - busy time)
  Microjoules wasted = 0;     // power x time of intervals that did not complete
  Microjoules completed = 0;  // power x time of intervals that completed

  Microjoules total() const { return active + idle; }
};

struct EnergyLedger {
  std::vector<MachineEnergy> machines;
  Microjoules active = 0;
  Microjoules idle = 0;
  Microjoules wasted = 0;
  Microjoules completed = 0;

  Microjoules total() const { return active + idle; }
};

inline EnergyLedger compute_ledger(const SimTrace& trace, const SimConfig& config) {
  EnergyLedger ledger;
  for (const auto& m : trace.machines) {
    const auto& spec = config.machine_types().at(m.type);
    MachineEnergy e;
    e.index = m.index;
    e.type_name = spec.name;
    for (const auto& iv : m.busy_intervals) {
      const Micros len = iv.end - iv.start;
      e.busy += len;
      (iv.completed ? e.completed : e.wasted) += spec.power * len;
    }
    e.active = spec.power * e.busy;
    e.idle = spec.idle_power * (trace.horizon - e.busy);
    ledger.active += e.active;
    ledger.idle += e.idle;
    ledger.wasted += e.wasted;
    ledger.completed += e.completed;
    ledger.machines.push_back(std::move(e));
  }
  return ledger;
}

/// Checks the exact identities per machine and in aggregate. Returns a
/// description of the first violation, or nothing.
inline std::optional<std::string> check_ledger(const EnergyLedger& ledger, Micros horizon) {
  Microjoules active = 0, idle = 0, wasted = 0, completed = 0;
  for (const auto& m : ledger.machines) {
    const std::string who = "machine " + std::to_string(m.index);
    if (m.active != m.completed + m.wasted)
      return who + ": active != completed-interval energy + wasted";
    if (m.wasted > m.active) return who + ": wasted exceeds active";
    if (m.busy < 0 || m.busy > horizon) return who + ": busy time outside [0, horizon]";
    if (m.idle < 0) return who + ": negative idle energy";
    active += m.active;
    idle += m.idle;
    wasted += m.wasted;
    completed += m.completed;
  }
  if (active != ledger.active || idle != ledger.idle || wasted != ledger.wasted ||
      completed != ledger.completed)
    return std::string("aggregate does not equal the sum over machines");
  if (ledger.active != ledger.completed + ledger.wasted)
    return std::string("aggregate active != completed-interval energy + wasted");
  return std::nullopt;
}

struct SimReport {
  std::string scenario;
  std::string scheduler;
  std::uint64_t seed = 0;
  std::int64_t total_tasks = 0;
  std::int64_t completed = 0;
  std::int64_t rejected_at_arrival = 0;
  std::int64_t dropped_in_queue = 0;
  std::int64_t cancelled_running = 0;
  Microjoules total_energy = 0;
  Microjoules active_energy = 0;
  Microjoules idle_energy = 0;
  Microjoules wasted_energy = 0;
  /// Dispatched tasks (completed or cancelled) per machine type, config order.
  std::vector<std::pair<std::string, std::int64_t>> assignments;

  double completion_pct() const {
    return total_tasks == 0 ? 0.0 : 100.0 * static_cast<double>(completed) /
                                         static_cast<double>(total_tasks);
  }
  /// Energy per completed task in microjoules, rounded half-up.
  std::optional<Microjoules> energy_per_completion() const {
    if (completed == 0) return std::nullopt;
    return (2 * total_energy + completed) / (2 * completed);
  }

  bool operator==(const SimReport&) const = default;
};

inline SimReport compute_report(const SimTrace& trace, const SimConfig& config,
                                std::string scenario, std::string scheduler, std::uint64_t seed) {
  SimReport r;
  r.scenario = std::move(scenario);
  r.scheduler = std::move(scheduler);
  r.seed = seed;
  r.total_tasks = static_cast<std::int64_t>(trace.records.size());
  for (const auto& t : config.machine_types()) r.assignments.emplace_back(t.name, 0);
  for (const auto& rec : trace.records) {
    switch (rec.status) {
      case TaskStatus::Completed: ++r.completed; break;
      case TaskStatus::RejectedAtArrival: ++r.rejected_at_arrival; break;
      case TaskStatus::DroppedInQueue: ++r.dropped_in_queue; break;
      case TaskStatus::CancelledRunning: ++r.cancelled_running; break;
    }
    if (rec.machine) ++r.assignments[config.machines().at(*rec.machine).type].second;
  }
  const auto ledger = compute_ledger(trace, config);
  r.total_energy = ledger.total();
  r.active_energy = ledger.active;
  r.idle_energy = ledger.idle;
  r.wasted_energy = ledger.wasted;
  return r;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Microjoules as millijoules with exactly three decimals.
inline std::string format_mj(Microjoules uj) {
  char buf[48];
  const auto a = uj < 0 ? -uj : uj;
  std::snprintf(buf, sizeof buf, "%s%lld.%03lld", uj < 0 ? "-" : "",
                static_cast<long long>(a / 1000), static_cast<long long>(a % 1000));
  return buf;
}

/// 100 * num / den with two decimals, rounded half-up; 0.00 when den is 0.
inline std::string format_pct(std::int64_t num, std::int64_t den) {
  if (den == 0) return "0.00";
  const std::int64_t hundredths = (20000 * num + den) / (2 * den);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%02lld", static_cast<long long>(hundredths / 100),
                static_cast<long long>(hundredths % 100));
  return buf;
}

inline std::string report_csv_header(const SimConfig& config) {
  std::string h =
      "scenario,scheduler,seed,total_tasks,completed,rejected_at_arrival,dropped_in_queue,"
      "cancelled_running,completion_pct,total_energy_mJ,active_energy_mJ,idle_energy_mJ,"
      "wasted_energy_mJ,energy_per_completion_mJ";
  for (const auto& t : config.machine_types()) h += ",assigned_" + t.name;
  return h;
}

inline std::string report_csv_row(const SimReport& r) {
  std::ostringstream out;
  out << r.scenario << ',' << r.scheduler << ',' << r.seed << ',' << r.total_tasks << ','
      << r.completed << ',' << r.rejected_at_arrival << ',' << r.dropped_in_queue << ','
      << r.cancelled_running << ',' << format_pct(r.completed, r.total_tasks) << ','
      << format_mj(r.total_energy) << ',' << format_mj(r.active_energy) << ','
      << format_mj(r.idle_energy) << ',' << format_mj(r.wasted_energy) << ',';
  if (auto epc = r.energy_per_completion()) out << format_mj(*epc);
  for (const auto& [name, count] : r.assignments) out << ',' << count;
  return out.str();
}

enum class ReportFormat { Json, Csv };

inline std::string write_report(const SimReport& r, ReportFormat format,
                                const SimConfig& config) {
  if (format == ReportFormat::Csv) return report_csv_header(config) + '\n' + report_csv_row(r) + '\n';

  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["scheduler"] = r.scheduler;
  j["seed"] = r.seed;
  j["total_tasks"] = r.total_tasks;
  j["completed"] = r.completed;
  j["rejected_at_arrival"] = r.rejected_at_arrival;
  j["dropped_in_queue"] = r.dropped_in_queue;
  j["cancelled_running"] = r.cancelled_running;
  j["completion_pct"] = format_pct(r.completed, r.total_tasks);
  j["total_energy_mJ"] = format_mj(r.total_energy);
  j["active_energy_mJ"] = format_mj(r.active_energy);
  j["idle_energy_mJ"] = format_mj(r.idle_energy);
  j["wasted_energy_mJ"] = format_mj(r.wasted_energy);
  if (auto epc = r.energy_per_completion())
    j["energy_per_completion_mJ"] = format_mj(*epc);
  else
    j["energy_per_completion_mJ"] = nullptr;
  auto& assigned = j["assignments_per_machine_type"];
  assigned = nlohmann::ordered_json::object();
  for (const auto& [name, count] : r.assignments) assigned[name] = count;
  return j.dump(2) + '\n';
}

namespace detail {

inline Microjoules parse_mj(const std::string& text) {
  const auto dot = text.find('.');
  const bool negative = !text.empty() && text.front() == '-';
  const std::string whole = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
  std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
  if (frac.size() > 3) throw std::invalid_argument("energy with more than 3 decimals: " + text);
  frac.resize(3, '0');
  const Microjoules v = std::stoll(whole) * 1000 + std::stoll(frac);
  return negative ? -v : v;
}

}  // namespace detail

/// Parses the JSON form produced by write_report.
inline SimReport parse_report_json(std::string_view text) {
  const auto j = nlohmann::ordered_json::parse(text);
  SimReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.scheduler = j.at("scheduler").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.total_tasks = j.at("total_tasks").get<std::int64_t>();
  r.completed = j.at("completed").get<std::int64_t>();
  r.rejected_at_arrival = j.at("rejected_at_arrival").get<std::int64_t>();
  r.dropped_in_queue = j.at("dropped_in_queue").get<std::int64_t>();
  r.cancelled_running = j.at("cancelled_running").get<std::int64_t>();
  r.total_energy = detail::parse_mj(j.at("total_energy_mJ").get<std::string>());
  r.active_energy = detail::parse_mj(j.at("active_energy_mJ").get<std::string>());
  r.idle_energy = detail::parse_mj(j.at("idle_energy_mJ").get<std::string>());
  r.wasted_energy = detail::parse_mj(j.at("wasted_energy_mJ").get<std::string>());
  for (const auto& [name, count] : j.at("assignments_per_machine_type").items())
    r.assignments.emplace_back(name, count.get<std::int64_t>());
  return r;
}

}  // namespace hcsim
