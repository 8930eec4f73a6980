#pragma once

// Synthetic workload generation for the low/medium/high scenarios, and the
// workload CSV format (task_type,data_size,arrival_time,deadline).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "hcsim/model.hpp"

namespace hcsim {

class WorkloadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskInstance {
  int task_type = 0;
  double data_size_kb = 0.0;  // rounded to 3 decimals
  Micros arrival = 0;
  Micros deadline = 0;
  std::int64_t seq = 0;  // position in (arrival, type, draw) order

  bool operator==(const TaskInstance&) const = default;
};

enum class ArrivalDistribution { Normal, Exponential, Uniform };

struct ScenarioSpec {
  std::string name;
  int count_per_type = 0;
  Micros window_start = 0;
  Micros window_end = 1'000'000;
  /// Indexed by task type id - 1, cycled when there are more types.
  std::vector<ArrivalDistribution> arrival_dists{
      ArrivalDistribution::Normal, ArrivalDistribution::Exponential,
      ArrivalDistribution::Uniform};

  ArrivalDistribution dist_for(int task_type_id) const {
    return arrival_dists[static_cast<std::size_t>(task_type_id - 1) % arrival_dists.size()];
  }
};

inline constexpr std::array<std::string_view, 3> kScenarioNames{"low", "medium", "high"};

inline std::optional<ScenarioSpec> scenario_by_name(std::string_view name) {
  ScenarioSpec s;
  s.name = std::string(name);
  if (name == "low")
    s.count_per_type = 700;
  else if (name == "medium")
    s.count_per_type = 1000;
  else if (name == "high")
    s.count_per_type = 1400;
  else
    return std::nullopt;
  return s;
}

// ---------------------------------------------------------------------------
// Random numbers
//
// Every draw goes through std::mt19937_64, whose output sequence is fixed by
// the standard. The std:: distribution objects are not (their algorithms are
// implementation-defined), so the continuous transforms are spelled out here
// to keep workloads identical across standard libraries.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seedable generator with one independent substream per key.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Substream for a key (task type id): adding a key leaves the others intact.
  static Rng substream(std::uint64_t seed, std::uint64_t key) {
    return Rng(splitmix64(seed) ^ splitmix64(0xD1B54A32D192ED03ull * (key + 1)));
  }

  /// Uniform in [0, 1), 53 bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal by Box-Muller; always consumes two words.
  double standard_normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential(double mean) { return -mean * std::log(1.0 - uniform01()); }

 private:
  std::mt19937_64 engine_;
};

/// Draws one absolute arrival time inside [start, end], rounded to whole us.
///
/// normal: N(midpoint, len/6); exponential: start + Exp(mean len/3);
/// uniform: U(start, end). Out-of-window draws are clamped, so the number of
/// words consumed per draw is fixed.
inline Micros sample_arrival(ArrivalDistribution dist, Micros start, Micros end, Rng& rng) {
  if (end < start) throw std::invalid_argument("sample_arrival: empty window");
  const double len = static_cast<double>(end - start);
  double t = 0.0;
  switch (dist) {
    case ArrivalDistribution::Normal:
      t = static_cast<double>(start) + len / 2.0 + (len / 6.0) * rng.standard_normal();
      break;
    case ArrivalDistribution::Exponential:
      t = static_cast<double>(start) + rng.exponential(len / 3.0);
      break;
    case ArrivalDistribution::Uniform:
      t = static_cast<double>(start) + len * rng.uniform01();
      break;
  }
  const auto us = static_cast<Micros>(std::llround(t));
  return std::clamp(us, start, end);
}

inline double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

/// N(mean, 0.15 mean) truncated below at 0.1 mean, 3-decimal KB.
inline double sample_data_size(double mean_kb, Rng& rng) {
  if (!(mean_kb > 0.0)) throw std::invalid_argument("sample_data_size: mean must be positive");
  const double x = mean_kb + 0.15 * mean_kb * rng.standard_normal();
  return round3(std::max(x, 0.1 * mean_kb));
}

inline void assign_sequence(std::vector<TaskInstance>& tasks) {
  for (std::size_t i = 0; i < tasks.size(); ++i) tasks[i].seq = static_cast<std::int64_t>(i);
}

inline std::vector<TaskInstance> generate_workload(const ScenarioSpec& scenario,
                                                   const std::vector<TaskTypeSpec>& task_types,
                                                   std::uint64_t seed) {
  struct Drawn {
    TaskInstance task;
    int draw = 0;
  };
  std::vector<Drawn> drawn;
  drawn.reserve(task_types.size() * static_cast<std::size_t>(scenario.count_per_type));
  for (const auto& type : task_types) {
    auto rng = Rng::substream(seed, static_cast<std::uint64_t>(type.id));
    const auto dist = scenario.dist_for(type.id);
    for (int k = 0; k < scenario.count_per_type; ++k) {
      TaskInstance t;
      t.task_type = type.id;
      t.arrival = sample_arrival(dist, scenario.window_start, scenario.window_end, rng);
      t.data_size_kb = sample_data_size(type.mean_data_size_kb, rng);
      t.deadline = t.arrival + type.slack;
      drawn.push_back({t, k});
    }
  }
  std::sort(drawn.begin(), drawn.end(), [](const Drawn& a, const Drawn& b) {
    return std::tie(a.task.arrival, a.task.task_type, a.draw) <
           std::tie(b.task.arrival, b.task.task_type, b.draw);
  });
  std::vector<TaskInstance> out;
  out.reserve(drawn.size());
  for (auto& d : drawn) out.push_back(d.task);
  assign_sequence(out);
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string format_millis(Micros us) {
  char buf[48];
  const char* sign = us < 0 ? "-" : "";
  const auto a = us < 0 ? -us : us;
  std::snprintf(buf, sizeof buf, "%s%lld.%03lld", sign, static_cast<long long>(a / 1000),
                static_cast<long long>(a % 1000));
  return buf;
}

inline constexpr std::string_view kWorkloadHeader = "task_type,data_size,arrival_time,deadline";

inline std::string write_workload_csv(const std::vector<TaskInstance>& tasks,
                                      const SimConfig& config) {
  std::string out(kWorkloadHeader);
  out += '\n';
  char size[64];
  for (const auto& t : tasks) {
    std::snprintf(size, sizeof size, "%.3f", t.data_size_kb);
    out += config.task_type(t.task_type).name;
    out += ',';
    out += size;
    out += ',';
    out += format_millis(t.arrival);
    out += ',';
    out += format_millis(t.deadline);
    out += '\n';
  }
  return out;
}

struct WorkloadReadResult {
  std::vector<TaskInstance> tasks;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    cols.push_back(trim(line.substr(pos, comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return cols;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace detail

/// Reads a workload CSV. Rows are stably ordered by (arrival, task type) and
/// renumbered, which leaves files written by write_workload_csv unchanged.
/// A deadline that disagrees with arrival + slack is kept and reported as a
/// warning.
inline WorkloadReadResult read_workload_csv(std::string_view text, const SimConfig& config) {
  WorkloadReadResult result;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty()) continue;
    const auto cols = detail::split_commas(line);
    const std::string where = "workload line " + std::to_string(line_no);
    if (!header_seen) {
      if (cols.size() != 4 || cols[0] != "task_type" || cols[1] != "data_size" ||
          cols[2] != "arrival_time" || cols[3] != "deadline")
        throw WorkloadError(where + ": expected header '" + std::string(kWorkloadHeader) + "'");
      header_seen = true;
      continue;
    }
    if (cols.size() != 4) throw WorkloadError(where + ": expected 4 columns");
    const auto type = config.task_type_id(cols[0]);
    if (!type)
      throw WorkloadError(where + ": unknown task type '" + std::string(cols[0]) + "'");
    const auto size = detail::parse_double(cols[1]);
    const auto arrival = detail::parse_double(cols[2]);
    const auto deadline = detail::parse_double(cols[3]);
    if (!size || !arrival || !deadline) throw WorkloadError(where + ": malformed number");
    TaskInstance t;
    t.task_type = *type;
    t.data_size_kb = *size;
    t.arrival = static_cast<Micros>(std::llround(*arrival * 1000.0));
    t.deadline = static_cast<Micros>(std::llround(*deadline * 1000.0));
    if (t.arrival < 0) throw WorkloadError(where + ": negative arrival time");
    if (t.deadline <= t.arrival)
      throw WorkloadError(where + ": deadline must be after arrival");
    if (t.deadline != t.arrival + config.task_type(*type).slack)
      result.warnings.push_back(where + ": deadline differs from arrival + slack");
    result.tasks.push_back(t);
  }
  if (!header_seen) throw WorkloadError("workload: missing header row");
  std::stable_sort(result.tasks.begin(), result.tasks.end(),
                   [](const TaskInstance& a, const TaskInstance& b) {
                     return std::tie(a.arrival, a.task_type) < std::tie(b.arrival, b.task_type);
                   });
  assign_sequence(result.tasks);
  return result;
}

}  // namespace hcsim
