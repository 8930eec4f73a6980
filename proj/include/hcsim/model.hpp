#pragma once

// Domain model: task types, machine types, the EET matrix and the
// configuration document that ties them together.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace hcsim {

/// Simulation time and durations, in integer microseconds.
using Micros = std::int64_t;
/// Energy, in integer microjoules (watts x microseconds).
using Microjoules = std::int64_t;
using Watts = std::int64_t;

/// Raised for malformed or inconsistent configuration documents. The message
/// starts with the field path of the offending value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SchedulingMethod { FCFS, FCFS_NQ, MECT, MEET };

inline constexpr SchedulingMethod kAllMethods[] = {
    SchedulingMethod::FCFS, SchedulingMethod::FCFS_NQ, SchedulingMethod::MECT,
    SchedulingMethod::MEET};

inline std::string_view to_string(SchedulingMethod m) {
  switch (m) {
    case SchedulingMethod::FCFS: return "FCFS";
    case SchedulingMethod::FCFS_NQ: return "FCFS-NQ";
    case SchedulingMethod::MECT: return "MECT";
    case SchedulingMethod::MEET: return "MEET";
  }
  return "?";
}

/// Case-insensitive lookup of a scheduler name.
inline std::optional<SchedulingMethod> parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto m : kAllMethods)
    if (upper == to_string(m)) return m;
  return std::nullopt;
}

struct TaskTypeSpec {
  int id = 0;  // 1-based, declaration order
  std::string name;
  double mean_data_size_kb = 0.0;
  Micros slack = 0;
  bool operator==(const TaskTypeSpec&) const = default;
};

struct MachineTypeSpec {
  std::string name;
  Watts power = 0;
  Watts idle_power = 0;
  int replicas = 1;
  bool operator==(const MachineTypeSpec&) const = default;
};

/// Expected execution time per (task type, machine type), dense.
class EetTable {
 public:
  EetTable() = default;
  EetTable(std::size_t task_types, std::size_t machine_types)
      : machine_types_(machine_types), cells_(task_types * machine_types, 0) {}

  Micros at(int task_type_id, std::size_t machine_type) const {
    return cells_.at(index(task_type_id, machine_type));
  }
  void set(int task_type_id, std::size_t machine_type, Micros eet) {
    cells_.at(index(task_type_id, machine_type)) = eet;
  }
  bool operator==(const EetTable&) const = default;

 private:
  std::size_t index(int task_type_id, std::size_t machine_type) const {
    if (task_type_id < 1 || machine_type >= machine_types_)
      throw std::out_of_range("EET lookup out of range");
    return static_cast<std::size_t>(task_type_id - 1) * machine_types_ + machine_type;
  }

  std::size_t machine_types_ = 0;
  std::vector<Micros> cells_;
};

/// One physical machine: a replica of a machine type.
struct Machine {
  std::size_t index = 0;
  std::size_t type = 0;  // index into SimConfig::machine_types
  int replica = 0;
  bool operator==(const Machine&) const = default;
};

class SimConfig {
 public:
  SimConfig() = default;
  SimConfig(std::vector<MachineTypeSpec> machine_types, std::vector<TaskTypeSpec> task_types,
            EetTable eet, SchedulingMethod method,
            std::optional<double> battery_capacity = std::nullopt)
      : machine_types_(std::move(machine_types)),
        task_types_(std::move(task_types)),
        eet_(std::move(eet)),
        method_(method),
        battery_capacity_(battery_capacity) {
    for (std::size_t t = 0; t < machine_types_.size(); ++t)
      for (int r = 0; r < machine_types_[t].replicas; ++r)
        machines_.push_back(Machine{machines_.size(), t, r});
  }

  const std::vector<MachineTypeSpec>& machine_types() const { return machine_types_; }
  const std::vector<TaskTypeSpec>& task_types() const { return task_types_; }
  /// Flattened machine park in canonical order: declaration order, then replica.
  const std::vector<Machine>& machines() const { return machines_; }
  const EetTable& eet_table() const { return eet_; }
  SchedulingMethod scheduling_method() const { return method_; }
  std::optional<double> battery_capacity() const { return battery_capacity_; }

  SimConfig with_method(SchedulingMethod m) const {
    SimConfig copy = *this;
    copy.method_ = m;
    return copy;
  }

  const TaskTypeSpec& task_type(int id) const {
    if (id < 1 || static_cast<std::size_t>(id) > task_types_.size())
      throw std::out_of_range("unknown task type id " + std::to_string(id));
    return task_types_[static_cast<std::size_t>(id - 1)];
  }
  std::optional<int> task_type_id(std::string_view name) const {
    for (const auto& t : task_types_)
      if (t.name == name) return t.id;
    return std::nullopt;
  }

  const MachineTypeSpec& machine_type_of(std::size_t machine_index) const {
    return machine_types_[machines_.at(machine_index).type];
  }
  std::string machine_label(std::size_t machine_index) const {
    const auto& m = machines_.at(machine_index);
    return machine_types_[m.type].name + "#" + std::to_string(m.replica);
  }

  Micros eet(int task_type_id, std::size_t machine_type) const {
    return eet_.at(task_type_id, machine_type);
  }

  bool operator==(const SimConfig&) const = default;

 private:
  std::vector<MachineTypeSpec> machine_types_;
  std::vector<TaskTypeSpec> task_types_;
  std::vector<Machine> machines_;
  EetTable eet_;
  SchedulingMethod method_ = SchedulingMethod::FCFS;
  std::optional<double> battery_capacity_;
};

/// EET of a task type on a concrete machine; replicas of one type share it.
inline Micros eet_lookup(const SimConfig& config, int task_type_id, std::size_t machine_index) {
  if (machine_index >= config.machines().size())
    throw std::out_of_range("machine index " + std::to_string(machine_index) +
                            " out of range (park has " +
                            std::to_string(config.machines().size()) + " machines)");
  return config.eet(task_type_id, config.machines()[machine_index].type);
}

namespace detail {

inline Micros ms_to_micros(double ms, const std::string& path) {
  if (!std::isfinite(ms) || ms <= 0.0)
    throw ConfigError(path + ": duration must be positive");
  const double us = ms * 1000.0;
  const double rounded = std::round(us);
  if (std::abs(us - rounded) > 1e-6)
    throw ConfigError(path + ": duration has sub-microsecond precision");
  return static_cast<Micros>(rounded);
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError(path + "." + key + ": missing field");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + "." + key + ": wrong type");
  }
}

}  // namespace detail

/// Parses and validates a JSON configuration document.
///
/// Expected keys: `machine_types` (list of {name, power, idle_power,
/// replicas, eet: {<task name>: ms}}), `task_types` (list of {name,
/// mean_data_size_kb, slack_ms}), `scheduling_method`, and an optional
/// `battery_capacity` which is accepted but has no effect.
inline SimConfig parse_config(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");

  if (!doc.contains("task_types") || !doc["task_types"].is_array() || doc["task_types"].empty())
    throw ConfigError("task_types: missing or empty list");
  if (!doc.contains("machine_types") || !doc["machine_types"].is_array() ||
      doc["machine_types"].empty())
    throw ConfigError("machine_types: missing or empty list");

  std::vector<TaskTypeSpec> tasks;
  std::set<std::string> task_names;
  for (std::size_t i = 0; i < doc["task_types"].size(); ++i) {
    const auto& node = doc["task_types"][i];
    const std::string path = "task_types[" + std::to_string(i) + "]";
    TaskTypeSpec t;
    t.id = static_cast<int>(i) + 1;
    t.name = detail::required<std::string>(node, "name", path);
    t.mean_data_size_kb = detail::required<double>(node, "mean_data_size_kb", path);
    if (!(t.mean_data_size_kb > 0.0))
      throw ConfigError(path + ".mean_data_size_kb: must be positive");
    t.slack = detail::ms_to_micros(detail::required<double>(node, "slack_ms", path),
                                   path + ".slack_ms");
    if (!task_names.insert(t.name).second)
      throw ConfigError(path + ".name: duplicate task type '" + t.name + "'");
    tasks.push_back(std::move(t));
  }

  std::vector<MachineTypeSpec> machines;
  std::set<std::string> machine_names;
  EetTable eet(tasks.size(), doc["machine_types"].size());
  for (std::size_t i = 0; i < doc["machine_types"].size(); ++i) {
    const auto& node = doc["machine_types"][i];
    const std::string path = "machine_types[" + std::to_string(i) + "]";
    MachineTypeSpec m;
    m.name = detail::required<std::string>(node, "name", path);
    m.power = detail::required<Watts>(node, "power", path);
    m.idle_power = detail::required<Watts>(node, "idle_power", path);
    m.replicas = detail::required<int>(node, "replicas", path);
    if (m.idle_power < 0 || m.idle_power > m.power)
      throw ConfigError(path + ".idle_power: must satisfy 0 <= idle_power <= power");
    if (m.replicas < 1) throw ConfigError(path + ".replicas: must be >= 1");
    if (!machine_names.insert(m.name).second)
      throw ConfigError(path + ".name: duplicate machine type '" + m.name + "'");

    if (!node.contains("eet") || !node["eet"].is_object())
      throw ConfigError(path + ".eet: missing EET map");
    const auto& row = node["eet"];
    for (const auto& key : row.items())
      if (!task_names.count(key.key()))
        throw ConfigError(path + ".eet." + key.key() + ": unknown task type");
    for (const auto& t : tasks) {
      const std::string cell = path + ".eet." + t.name;
      if (!row.contains(t.name))
        throw ConfigError(cell + ": missing EET entry for (" + t.name + ", " + m.name + ")");
      if (!row[t.name].is_number()) throw ConfigError(cell + ": wrong type");
      eet.set(t.id, i, detail::ms_to_micros(row[t.name].get<double>(), cell));
    }
    machines.push_back(std::move(m));
  }

  const auto method_name = detail::required<std::string>(doc, "scheduling_method", "config");
  const auto method = parse_method(method_name);
  if (!method)
    throw ConfigError("scheduling_method: unknown scheduling method '" + method_name + "'");

  std::optional<double> battery;
  if (doc.contains("battery_capacity") && !doc["battery_capacity"].is_null()) {
    if (!doc["battery_capacity"].is_number())
      throw ConfigError("battery_capacity: wrong type");
    battery = doc["battery_capacity"].get<double>();
  }

  return SimConfig(std::move(machines), std::move(tasks), std::move(eet), *method, battery);
}

/// The baseline configuration document (CPU/GPU/ASIC park, three task types).
inline const char* default_preset_document() {
  return R"({
  "scheduling_method": "FCFS",
  "battery_capacity": null,
  "task_types": [
    {"name": "Task1", "mean_data_size_kb": 100, "slack_ms": 2},
    {"name": "Task2", "mean_data_size_kb": 75, "slack_ms": 1.5},
    {"name": "Task3", "mean_data_size_kb": 50, "slack_ms": 1}
  ],
  "machine_types": [
    {"name": "CPU", "power": 150, "idle_power": 15, "replicas": 2,
     "eet": {"Task1": 5, "Task2": 4, "Task3": 3}},
    {"name": "GPU", "power": 300, "idle_power": 30, "replicas": 4,
     "eet": {"Task1": 2, "Task2": 1.5, "Task3": 1}},
    {"name": "ASIC", "power": 50, "idle_power": 5, "replicas": 2,
     "eet": {"Task1": 1, "Task2": 0.8, "Task3": 0.5}}
  ]
}
)";
}

inline SimConfig default_preset() { return parse_config(default_preset_document()); }

}  // namespace hcsim
