#pragma once

// Shared helpers for the test binaries.

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hcsim/engine.hpp"
#include "hcsim/model.hpp"
#include "hcsim/scheduler.hpp"
#include "hcsim/workload.hpp"
#include "oracle/brute_force.hpp"

namespace testing_support {

using namespace hcsim;

inline TaskInstance make_task(const SimConfig& cfg, int type, Micros arrival, std::int64_t seq) {
  TaskInstance t;
  t.task_type = type;
  t.data_size_kb = cfg.task_type(type).mean_data_size_kb;
  t.arrival = arrival;
  t.deadline = arrival + cfg.task_type(type).slack;
  t.seq = seq;
  return t;
}

/// Up to `max_tasks` tasks on a coarse time grid so that same-timestamp
/// arrivals, completions and deadlines collide often.
inline std::vector<TaskInstance> random_workload(const SimConfig& cfg, std::mt19937_64& rng,
                                                 int max_tasks) {
  std::uniform_int_distribution<int> count(0, max_tasks);
  std::uniform_int_distribution<int> type(1, static_cast<int>(cfg.task_types().size()));
  std::uniform_int_distribution<int> window_pick(0, 2);
  const Micros windows[] = {2'000, 8'000, 25'000};
  const Micros window = windows[window_pick(rng)];
  std::uniform_int_distribution<Micros> slot(0, window / 250);
  std::vector<TaskInstance> tasks;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) tasks.push_back(make_task(cfg, type(rng), slot(rng) * 250, 0));
  std::stable_sort(tasks.begin(), tasks.end(),
                   [](const auto& a, const auto& b) { return a.arrival < b.arrival; });
  assign_sequence(tasks);
  return tasks;
}

inline oracle::Policy to_policy(SchedulingMethod m) {
  switch (m) {
    case SchedulingMethod::FCFS: return oracle::Policy::Fcfs;
    case SchedulingMethod::FCFS_NQ: return oracle::Policy::FcfsNq;
    case SchedulingMethod::MECT: return oracle::Policy::Mect;
    case SchedulingMethod::MEET: return oracle::Policy::Meet;
  }
  return oracle::Policy::Fcfs;
}

inline oracle::Outcome to_outcome(TaskStatus s) {
  switch (s) {
    case TaskStatus::Completed: return oracle::Outcome::Completed;
    case TaskStatus::RejectedAtArrival: return oracle::Outcome::Rejected;
    case TaskStatus::DroppedInQueue: return oracle::Outcome::Dropped;
    case TaskStatus::CancelledRunning: return oracle::Outcome::Cancelled;
  }
  return oracle::Outcome::Pending;
}

/// Empty when engine and brute-force reference agree on every task outcome,
/// every busy interval and the horizon; otherwise the first difference.
inline std::string diff_against_oracle(const SimConfig& cfg, const std::vector<TaskInstance>& tasks,
                                       SchedulingMethod method) {
  const auto config = cfg.with_method(method);
  auto scheduler = make_scheduler(method, config);
  const auto trace = run_simulation(config, tasks, *scheduler);
  const auto ref = oracle::simulate(config, tasks, to_policy(method));

  std::ostringstream d;
  if (trace.records.size() != ref.results.size()) return "record count differs";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& a = trace.records[i];
    const auto& b = ref.results[i];
    if (to_outcome(a.status) != b.outcome || a.machine != b.machine || a.start != b.start ||
        a.finish_or_cancel != b.end) {
      d << "task " << i << ": engine " << to_string(a.status) << " m="
        << (a.machine ? static_cast<long long>(*a.machine) : -1) << " start="
        << a.start.value_or(-1) << " end=" << a.finish_or_cancel.value_or(-1)
        << " vs oracle outcome=" << static_cast<int>(b.outcome)
        << " m=" << (b.machine ? static_cast<long long>(*b.machine) : -1)
        << " start=" << b.start.value_or(-1) << " end=" << b.end.value_or(-1);
      return d.str();
    }
  }
  for (std::size_t m = 0; m < trace.machines.size(); ++m) {
    const auto& a = trace.machines[m].busy_intervals;
    const auto& b = ref.busy[m];
    if (a.size() != b.size()) return "machine " + std::to_string(m) + ": interval count differs";
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k].start != b[k].start || a[k].end != b[k].end || a[k].task_seq != b[k].task_seq ||
          a[k].completed != b[k].completed)
        return "machine " + std::to_string(m) + ": interval " + std::to_string(k) + " differs";
  }
  if (trace.horizon != ref.horizon) return "horizon differs";
  return {};
}

}  // namespace testing_support
