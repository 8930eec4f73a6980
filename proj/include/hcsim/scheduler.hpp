#pragma once

// Mapping policies. The engine asks a scheduler what to do with each arrival
// and, for policies that keep a central queue, what to start on a machine
// that just became idle.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include "hcsim/model.hpp"
#include "hcsim/workload.hpp"

namespace hcsim {

struct MachineView {
  std::size_t index = 0;
  std::size_t type = 0;
  /// When the machine could start new work: max(now, busy_until) plus the
  /// EET of everything already waiting in its pending queue.
  Micros ready_time = 0;
  bool idle = true;
};

struct StateView {
  Micros now = 0;
  std::span<const MachineView> machines;
  std::size_t central_queue_len = 0;
};

struct Decision {
  enum class Kind { Assign, HoldCentral, Reject };
  Kind kind = Kind::Reject;
  std::size_t machine = 0;

  static Decision assign(std::size_t m) { return {Kind::Assign, m}; }
  static Decision hold() { return {Kind::HoldCentral, 0}; }
  static Decision reject() { return {Kind::Reject, 0}; }
  bool operator==(const Decision&) const = default;
};

class Scheduler {
 public:
  explicit Scheduler(const SimConfig& config) : config_(&config) {}
  virtual ~Scheduler() = default;
  Scheduler(const Scheduler&) = delete;
  Scheduler& operator=(const Scheduler&) = delete;

  virtual SchedulingMethod method() const = 0;
  virtual Decision on_arrival(const StateView& view, const TaskInstance& task) = 0;

  /// Next task to run on an idle machine; only central-queue policies return one.
  virtual std::optional<TaskInstance> on_machine_idle(const StateView&, std::size_t) {
    return std::nullopt;
  }
  /// Removes a held task (deadline expiry). True when the task was held.
  virtual bool withdraw(std::int64_t) { return false; }
  virtual std::size_t central_queue_len() const { return 0; }
  /// Whether Assign may target a busy machine (the task then waits in that
  /// machine's FIFO pending queue).
  virtual bool uses_machine_queues() const { return false; }

 protected:
  Micros eet(const TaskInstance& task, std::size_t machine_type) const {
    return config_->eet(task.task_type, machine_type);
  }
  const SimConfig& config() const { return *config_; }

  static std::optional<std::size_t> first_idle(const StateView& view) {
    for (const auto& m : view.machines)
      if (m.idle) return m.index;
    return std::nullopt;
  }

 private:
  const SimConfig* config_;
};

/// First come, first served: idle machine with the lowest index, otherwise
/// wait in a central FIFO.
class FcfsScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;

  SchedulingMethod method() const override { return SchedulingMethod::FCFS; }

  Decision on_arrival(const StateView& view, const TaskInstance& task) override {
    if (auto m = first_idle(view)) return Decision::assign(*m);
    queue_.push_back(task);
    return Decision::hold();
  }

  std::optional<TaskInstance> on_machine_idle(const StateView&, std::size_t) override {
    if (queue_.empty()) return std::nullopt;
    auto head = queue_.front();
    queue_.pop_front();
    return head;
  }

  bool withdraw(std::int64_t seq) override {
    auto it = std::find_if(queue_.begin(), queue_.end(),
                           [seq](const TaskInstance& t) { return t.seq == seq; });
    if (it == queue_.end()) return false;
    queue_.erase(it);
    return true;
  }

  std::size_t central_queue_len() const override { return queue_.size(); }

 private:
  std::deque<TaskInstance> queue_;
};

/// FCFS without queuing: arrivals that find every machine busy are rejected.
class FcfsNoQueueScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;

  SchedulingMethod method() const override { return SchedulingMethod::FCFS_NQ; }

  Decision on_arrival(const StateView& view, const TaskInstance&) override {
    if (auto m = first_idle(view)) return Decision::assign(*m);
    return Decision::reject();
  }
};

/// Minimum expected completion time: argmin of ready_time + EET, lowest
/// index on ties.
class MectScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;

  SchedulingMethod method() const override { return SchedulingMethod::MECT; }
  bool uses_machine_queues() const override { return true; }

  Decision on_arrival(const StateView& view, const TaskInstance& task) override {
    std::size_t best = 0;
    Micros best_completion = std::numeric_limits<Micros>::max();
    for (const auto& m : view.machines) {
      const Micros completion = m.ready_time + eet(task, m.type);
      if (completion < best_completion) {
        best_completion = completion;
        best = m.index;
      }
    }
    return Decision::assign(best);
  }
};

/// Minimum expected execution time: only machines whose type has the
/// smallest EET for the task; least ready_time, then lowest index.
class MeetScheduler final : public Scheduler {
 public:
  using Scheduler::Scheduler;

  SchedulingMethod method() const override { return SchedulingMethod::MEET; }
  bool uses_machine_queues() const override { return true; }

  Decision on_arrival(const StateView& view, const TaskInstance& task) override {
    Micros fastest = std::numeric_limits<Micros>::max();
    for (const auto& m : view.machines) fastest = std::min(fastest, eet(task, m.type));
    std::optional<std::size_t> best;
    Micros best_ready = std::numeric_limits<Micros>::max();
    for (const auto& m : view.machines) {
      if (eet(task, m.type) != fastest) continue;
      if (m.ready_time < best_ready) {
        best_ready = m.ready_time;
        best = m.index;
      }
    }
    return Decision::assign(best.value());
  }
};

inline std::unique_ptr<Scheduler> make_scheduler(SchedulingMethod method, const SimConfig& config) {
  switch (method) {
    case SchedulingMethod::FCFS: return std::make_unique<FcfsScheduler>(config);
    case SchedulingMethod::FCFS_NQ: return std::make_unique<FcfsNoQueueScheduler>(config);
    case SchedulingMethod::MECT: return std::make_unique<MectScheduler>(config);
    case SchedulingMethod::MEET: return std::make_unique<MeetScheduler>(config);
  }
  throw std::invalid_argument("unknown scheduling method");
}

}  // namespace hcsim
