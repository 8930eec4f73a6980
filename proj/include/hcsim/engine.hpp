#pragma once

// Discrete-event simulation core.
//
// Events at the same timestamp are processed Completion, then DeadlineCheck,
// then Arrival, then in insertion order. A task finishing exactly at its
// deadline therefore completes, and machines freed at t are visible to
// arrivals at t.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "hcsim/model.hpp"
#include "hcsim/scheduler.hpp"
#include "hcsim/workload.hpp"

namespace hcsim {

/// The scheduler or caller broke an engine precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr Micros kMinHorizon = 1'000'000;

enum class EventClass : int { Completion = 0, DeadlineCheck = 1, Arrival = 2 };

inline std::string_view to_string(EventClass c) {
  switch (c) {
    case EventClass::Completion: return "completion";
    case EventClass::DeadlineCheck: return "deadline";
    case EventClass::Arrival: return "arrival";
  }
  return "?";
}

struct Event {
  Micros time = 0;
  EventClass cls = EventClass::Arrival;
  std::uint64_t seq = 0;
  std::size_t task = 0;     // index into the workload
  std::size_t machine = 0;  // Completion only

  /// Strict (time, class, seq) order.
  friend bool operator<(const Event& a, const Event& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.cls != b.cls) return a.cls < b.cls;
    return a.seq < b.seq;
  }
};

struct BusyInterval {
  Micros start = 0;
  Micros end = 0;
  std::int64_t task_seq = 0;
  bool completed = false;
  bool operator==(const BusyInterval&) const = default;
};

struct MachineState {
  std::size_t index = 0;
  std::size_t type = 0;
  std::string type_name;
  Micros busy_until = 0;
  std::optional<std::size_t> current_task;
  std::deque<std::size_t> pending;
  std::vector<BusyInterval> busy_intervals;
};

enum class TaskStatus { Completed, RejectedAtArrival, DroppedInQueue, CancelledRunning };

inline std::string_view to_string(TaskStatus s) {
  switch (s) {
    case TaskStatus::Completed: return "completed";
    case TaskStatus::RejectedAtArrival: return "rejected";
    case TaskStatus::DroppedInQueue: return "dropped";
    case TaskStatus::CancelledRunning: return "cancelled";
  }
  return "?";
}

struct TaskRecord {
  TaskInstance task;
  TaskStatus status = TaskStatus::DroppedInQueue;
  std::optional<std::size_t> machine;
  std::optional<Micros> start;
  std::optional<Micros> finish_or_cancel;
  bool operator==(const TaskRecord&) const = default;
};

/// Scheduler input and output at one arrival, kept for post-hoc checks.
struct DecisionRecord {
  Micros now = 0;
  std::int64_t task_seq = 0;
  Decision decision;
  std::vector<Micros> ready_times;
  std::size_t central_queue_len = 0;
};

struct SimTrace {
  std::vector<TaskRecord> records;  // workload order
  std::vector<MachineState> machines;
  Micros horizon = kMinHorizon;
  std::vector<std::string> event_log;  // time_us,class,task_seq,machine_index,action
  std::vector<DecisionRecord> decisions;
};

struct SimOptions {
  bool record_events = false;
  bool record_decisions = false;
};

class Simulation {
 public:
  /// `workload` must be sorted by (arrival, seq) with unique seq values.
  Simulation(const SimConfig& config, std::vector<TaskInstance> workload, Scheduler& scheduler,
             SimOptions options = {})
      : config_(config), scheduler_(scheduler), options_(options) {
    for (const auto& m : config.machines())
      machines_.push_back(MachineState{m.index, m.type, config.machine_types()[m.type].name, 0,
                                       std::nullopt, {}, {}});
    tasks_.reserve(workload.size());
    for (std::size_t i = 0; i < workload.size(); ++i) {
      const auto& t = workload[i];
      if (i > 0 && std::tie(t.arrival, t.seq) <= std::tie(workload[i - 1].arrival, workload[i - 1].seq))
        throw ContractViolation("workload not sorted by (arrival, seq) at index " +
                                std::to_string(i));
      if (t.arrival < 0 || t.deadline <= t.arrival)
        throw ContractViolation("task " + std::to_string(t.seq) + " has an invalid time window");
      config.task_type(t.task_type);
      by_seq_.emplace(t.seq, i);
      tasks_.push_back(TaskSlot{TaskRecord{t, TaskStatus::DroppedInQueue, {}, {}, {}},
                                Phase::NotArrived, 0});
    }
    for (std::size_t i = 0; i < tasks_.size(); ++i)
      push(Event{tasks_[i].record.task.arrival, EventClass::Arrival, 0, i, 0});
  }

  /// Runs every pending event and returns the trace.
  SimTrace run() {
    while (step()) {
    }
    return finish();
  }

  /// Processes one event; false when the queue is empty.
  bool step() {
    if (events_.empty()) return false;
    const Event ev = events_.top();
    events_.pop();
    switch (ev.cls) {
      case EventClass::Arrival: on_arrival(ev); break;
      case EventClass::Completion: on_completion(ev); break;
      case EventClass::DeadlineCheck: cancel_on_deadline(ev.task, ev.time); break;
    }
    return true;
  }

  /// Starts task `task` on an idle machine at `now`.
  void dispatch(std::size_t task, std::size_t machine, Micros now) {
    auto& m = machine_at(machine);
    if (m.current_task)
      throw ContractViolation("dispatch to busy machine " + config_.machine_label(machine) +
                              " at t=" + std::to_string(now));
    auto& slot = tasks_.at(task);
    const Micros eet = config_.eet(slot.record.task.task_type, m.type);
    m.current_task = task;
    m.busy_until = now + eet;
    m.busy_intervals.push_back(BusyInterval{now, now + eet, slot.record.task.seq, false});
    slot.phase = Phase::Running;
    slot.machine = machine;
    slot.record.machine = machine;
    slot.record.start = now;
    push(Event{now + eet, EventClass::Completion, 0, task, machine});
  }

  /// Resolves a task whose deadline has been reached.
  void cancel_on_deadline(std::size_t task, Micros now) {
    auto& slot = tasks_.at(task);
    last_time_ = std::max(last_time_, now);
    switch (slot.phase) {
      case Phase::Done:
      case Phase::NotArrived:
        log(now, EventClass::DeadlineCheck, task, std::nullopt, "noop");
        return;
      case Phase::Central:
        if (!scheduler_.withdraw(slot.record.task.seq))
          throw ContractViolation("scheduler lost held task " +
                                  std::to_string(slot.record.task.seq));
        resolve(task, TaskStatus::DroppedInQueue);
        log(now, EventClass::DeadlineCheck, task, std::nullopt, "drop");
        return;
      case Phase::Pending: {
        auto& q = machines_[slot.machine].pending;
        q.erase(std::find(q.begin(), q.end(), task));
        resolve(task, TaskStatus::DroppedInQueue);
        log(now, EventClass::DeadlineCheck, task, slot.machine, "drop");
        return;
      }
      case Phase::Running: {
        auto& m = machines_[slot.machine];
        auto& interval = m.busy_intervals.back();
        interval.end = now;
        interval.completed = false;
        m.current_task.reset();
        m.busy_until = now;
        slot.record.finish_or_cancel = now;
        resolve(task, TaskStatus::CancelledRunning);
        log(now, EventClass::DeadlineCheck, task, m.index, "cancel");
        refill(m.index, now);
        return;
      }
    }
  }

  const std::vector<MachineState>& machines() const { return machines_; }
  /// Pending events in processing order.
  std::vector<Event> pending_events() const {
    auto copy = events_;
    std::vector<Event> out;
    while (!copy.empty()) {
      out.push_back(copy.top());
      copy.pop();
    }
    return out;
  }

  StateView view(Micros now) {
    view_buffer_.clear();
    for (const auto& m : machines_) {
      Micros ready = m.current_task ? std::max(now, m.busy_until) : now;
      for (auto t : m.pending) ready += config_.eet(tasks_[t].record.task.task_type, m.type);
      view_buffer_.push_back(MachineView{m.index, m.type, ready, !m.current_task.has_value()});
    }
    return StateView{now, view_buffer_, scheduler_.central_queue_len()};
  }

 private:
  enum class Phase { NotArrived, Central, Pending, Running, Done };

  struct TaskSlot {
    TaskRecord record;
    Phase phase = Phase::NotArrived;
    std::size_t machine = 0;
  };

  struct Later {
    bool operator()(const Event& a, const Event& b) const { return b < a; }
  };

  MachineState& machine_at(std::size_t index) {
    if (index >= machines_.size())
      throw ContractViolation("machine index " + std::to_string(index) + " out of range");
    return machines_[index];
  }

  void push(Event ev) {
    ev.seq = next_seq_++;
    events_.push(ev);
  }

  void resolve(std::size_t task, TaskStatus status) {
    auto& slot = tasks_[task];
    slot.phase = Phase::Done;
    slot.record.status = status;
    if (status == TaskStatus::DroppedInQueue || status == TaskStatus::RejectedAtArrival) {
      slot.record.machine.reset();
      slot.record.start.reset();
      slot.record.finish_or_cancel.reset();
    }
  }

  void on_arrival(const Event& ev) {
    const Micros now = ev.time;
    last_time_ = std::max(last_time_, now);
    auto& slot = tasks_[ev.task];
    const TaskInstance task = slot.record.task;
    push(Event{task.deadline, EventClass::DeadlineCheck, 0, ev.task, 0});

    const auto sv = view(now);
    const Decision d = scheduler_.on_arrival(sv, task);
    if (options_.record_decisions) {
      DecisionRecord rec{now, task.seq, d, {}, sv.central_queue_len};
      for (const auto& m : sv.machines) rec.ready_times.push_back(m.ready_time);
      decisions_.push_back(std::move(rec));
    }

    switch (d.kind) {
      case Decision::Kind::Assign: {
        auto& m = machine_at(d.machine);
        if (!m.current_task) {
          log(now, EventClass::Arrival, ev.task, d.machine, "assign");
          dispatch(ev.task, d.machine, now);
        } else if (scheduler_.uses_machine_queues()) {
          m.pending.push_back(ev.task);
          slot.phase = Phase::Pending;
          slot.machine = d.machine;
          log(now, EventClass::Arrival, ev.task, d.machine, "enqueue");
        } else {
          throw ContractViolation(std::string(to_string(scheduler_.method())) +
                                  " assigned task " + std::to_string(task.seq) +
                                  " to busy machine " + config_.machine_label(d.machine));
        }
        break;
      }
      case Decision::Kind::HoldCentral:
        slot.phase = Phase::Central;
        log(now, EventClass::Arrival, ev.task, std::nullopt, "hold");
        break;
      case Decision::Kind::Reject:
        resolve(ev.task, TaskStatus::RejectedAtArrival);
        log(now, EventClass::Arrival, ev.task, std::nullopt, "reject");
        break;
    }
  }

  void on_completion(const Event& ev) {
    auto& m = machines_[ev.machine];
    // Completions of cancelled tasks stay queued; they are stale.
    if (m.current_task != ev.task) return;
    last_time_ = std::max(last_time_, ev.time);
    auto& slot = tasks_[ev.task];
    m.busy_intervals.back().completed = true;
    m.current_task.reset();
    slot.record.finish_or_cancel = ev.time;
    resolve(ev.task, TaskStatus::Completed);
    log(ev.time, EventClass::Completion, ev.task, m.index, "complete");
    refill(m.index, ev.time);
  }

  /// Starts the next runnable task on a freshly idle machine: its own pending
  /// queue first, then the scheduler's central queue. Tasks whose deadline is
  /// already reached cannot complete and are dropped instead.
  void refill(std::size_t machine, Micros now) {
    auto& m = machines_[machine];
    while (!m.pending.empty()) {
      const auto next = m.pending.front();
      m.pending.pop_front();
      if (tasks_[next].record.task.deadline <= now) {
        resolve(next, TaskStatus::DroppedInQueue);
        continue;
      }
      dispatch(next, machine, now);
      return;
    }
    while (true) {
      const auto sv = view(now);
      auto picked = scheduler_.on_machine_idle(sv, machine);
      if (!picked) return;
      auto it = by_seq_.find(picked->seq);
      if (it == by_seq_.end() || tasks_[it->second].phase != Phase::Central)
        throw ContractViolation("scheduler released task " + std::to_string(picked->seq) +
                                " that it does not hold");
      if (picked->deadline <= now) {
        resolve(it->second, TaskStatus::DroppedInQueue);
        continue;
      }
      dispatch(it->second, machine, now);
      return;
    }
  }

  void log(Micros time, EventClass cls, std::size_t task, std::optional<std::size_t> machine,
           std::string_view action) {
    if (!options_.record_events) return;
    std::ostringstream line;
    line << time << ',' << to_string(cls) << ',' << tasks_[task].record.task.seq << ','
         << (machine ? static_cast<long long>(*machine) : -1LL) << ',' << action;
    event_log_.push_back(line.str());
  }

  SimTrace finish() {
    SimTrace trace;
    trace.records.reserve(tasks_.size());
    for (auto& slot : tasks_) {
      if (slot.phase != Phase::Done)
        throw ContractViolation("task " + std::to_string(slot.record.task.seq) +
                                " unresolved at end of run");
      trace.records.push_back(slot.record);
    }
    trace.machines = machines_;
    trace.horizon = std::max(kMinHorizon, last_time_);
    trace.event_log = std::move(event_log_);
    trace.decisions = std::move(decisions_);
    return trace;
  }

  const SimConfig& config_;
  Scheduler& scheduler_;
  SimOptions options_;
  std::vector<MachineState> machines_;
  std::vector<TaskSlot> tasks_;
  std::unordered_map<std::int64_t, std::size_t> by_seq_;
  std::priority_queue<Event, std::vector<Event>, Later> events_;
  std::uint64_t next_seq_ = 0;
  Micros last_time_ = 0;
  std::vector<std::string> event_log_;
  std::vector<DecisionRecord> decisions_;
  std::vector<MachineView> view_buffer_;
};

inline SimTrace run_simulation(const SimConfig& config, std::vector<TaskInstance> workload,
                               Scheduler& scheduler, SimOptions options = {}) {
  return Simulation(config, std::move(workload), scheduler, options).run();
}

/// Canonical text form of a trace's outcome, for byte-level comparison.
inline std::string serialize_trace(const SimTrace& trace) {
  std::ostringstream out;
  out << "horizon," << trace.horizon << '\n';
  for (const auto& r : trace.records) {
    out << "task," << r.task.seq << ',' << to_string(r.status) << ','
        << (r.machine ? static_cast<long long>(*r.machine) : -1LL) << ','
        << (r.start ? *r.start : -1) << ',' << (r.finish_or_cancel ? *r.finish_or_cancel : -1)
        << '\n';
  }
  for (const auto& m : trace.machines)
    for (const auto& iv : m.busy_intervals)
      out << "busy," << m.index << ',' << iv.start << ',' << iv.end << ',' << iv.task_seq << ','
          << (iv.completed ? 1 : 0) << '\n';
  return out.str();
}

}  // namespace hcsim
