// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are pinned in the constants below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "hcsim/bench.hpp"
#include "hcsim/cli.hpp"
#include "support.hpp"

using namespace hcsim;
namespace fs = std::filesystem;

namespace {

constexpr int kOracleWorkloads = 200;
constexpr int kOracleMaxTasks = 20;
constexpr double kOracleBudgetSeconds = 30.0;
constexpr int kDegenerateWorkloads = 50;
constexpr int kDistributionDraws = 10'000;
// Normal N(500 ms, 1000/6 ms): 3 standard errors of the mean at 10k draws is ~5 ms.
constexpr double kNormalMeanTolUs = 5'000.0;
constexpr double kNormalSdTolUs = 5'000.0;
// Exponential with mean 1000/3 ms, clamped to the window: median ln2 * mean.
constexpr double kExpMedianTolUs = 10'000.0;
// Chi-square, 10 equal bins, 9 d.o.f., p = 0.001.
constexpr double kUniformChi2Critical = 27.88;

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Verdict& v) {
  std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++failures;
}

std::string mean_table(const std::vector<SummaryCell>& summary,
                       const std::function<double(const SummaryCell&)>& metric) {
  std::ostringstream out;
  for (const auto& s : kScenarioNames) {
    out << " " << s << "{";
    bool first = true;
    for (const auto& c : summary)
      if (c.scenario == s) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%s=%.2f", first ? "" : " ", c.scheduler.c_str(), metric(c));
        out << buf;
        first = false;
      }
    out << "}";
  }
  return out.str();
}

Verdict ledger(const BenchPlan& plan) {
  std::size_t runs = 0;
  for (const auto& s : plan.scenarios)
    for (auto m : plan.schedulers)
      for (auto seed : plan.seeds) {
        const auto cfg = plan.config.with_method(m);
        auto sch = make_scheduler(m, cfg);
        const auto trace = run_simulation(
            cfg, generate_workload(*scenario_by_name(s), cfg.task_types(), seed), *sch);
        const auto l = compute_ledger(trace, cfg);
        if (auto err = check_ledger(l, trace.horizon))
          return {false, s + "/" + std::string(to_string(m)) + "/" + std::to_string(seed) + ": " + *err};
        for (const auto& me : l.machines)
          if (me.total() != me.active + me.idle) return {false, "per-machine total mismatch"};
        ++runs;
      }
  return {true, std::to_string(runs) + " runs, all identities exact"};
}

Verdict oracle_equivalence() {
  const auto cfg = default_preset();
  std::mt19937_64 rng(20240611);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < kOracleWorkloads; ++i) {
    const auto tasks = testing_support::random_workload(cfg, rng, kOracleMaxTasks);
    for (auto m : kAllMethods) {
      const auto diff = testing_support::diff_against_oracle(cfg, tasks, m);
      if (!diff.empty())
        return {false, "workload " + std::to_string(i) + " " + std::string(to_string(m)) + ": " + diff};
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d workloads x 4 schedulers identical in %.2f s (budget %.0f s)",
                kOracleWorkloads, secs, kOracleBudgetSeconds);
  return {secs < kOracleBudgetSeconds, buf};
}

Verdict meet_funneling(const BenchPlan& plan) {
  std::int64_t dispatched = 0, off_asic = 0;
  for (const auto& s : plan.scenarios)
    for (auto seed : plan.seeds) {
      const auto cfg = plan.config.with_method(SchedulingMethod::MEET);
      auto sch = make_scheduler(SchedulingMethod::MEET, cfg);
      const auto trace = run_simulation(
          cfg, generate_workload(*scenario_by_name(s), cfg.task_types(), seed), *sch);
      for (const auto& r : trace.records) {
        if (!r.machine) continue;
        ++dispatched;
        off_asic += cfg.machine_type_of(*r.machine).name != "ASIC";
      }
    }
  return {off_asic == 0 && dispatched > 0,
          std::to_string(dispatched) + " dispatches, " + std::to_string(off_asic) + " off ASIC"};
}

Verdict cpu_futility(const BenchResult& bench, const BenchPlan& plan) {
  std::int64_t cpu_completions = 0;
  for (const auto& s : plan.scenarios)
    for (auto m : plan.schedulers)
      for (auto seed : plan.seeds) {
        const auto cfg = plan.config.with_method(m);
        auto sch = make_scheduler(m, cfg);
        const auto trace = run_simulation(
            cfg, generate_workload(*scenario_by_name(s), cfg.task_types(), seed), *sch);
        for (const auto& r : trace.records)
          if (r.status == TaskStatus::Completed && cfg.machine_type_of(*r.machine).name == "CPU")
            ++cpu_completions;
      }
  std::int64_t cpu_dispatches = 0;
  for (const auto& r : bench.reports) cpu_dispatches += r.assignments[0].second;
  return {cpu_completions == 0, std::to_string(cpu_completions) + " CPU completions out of " +
                                    std::to_string(cpu_dispatches) + " CPU dispatches"};
}

const SummaryCell& cell(const std::vector<SummaryCell>& s, const std::string& scenario,
                        const std::string& scheduler) {
  for (const auto& c : s)
    if (c.scenario == scenario && c.scheduler == scheduler) return c;
  throw std::runtime_error("missing summary cell " + scenario + "/" + scheduler);
}

Verdict completion_orderings(const std::vector<SummaryCell>& s) {
  std::vector<std::string> broken;
  auto pct = [&](const std::string& sc, const std::string& m) { return cell(s, sc, m).completion_pct; };
  for (const auto& scv : kScenarioNames) {
    const std::string sc(scv);
    for (const char* other : {"FCFS", "FCFS-NQ", "MEET"})
      if (!(pct(sc, "MECT") > pct(sc, other))) broken.push_back("(a) MECT<=" + std::string(other) + "@" + sc);
  }
  if (!(pct("low", "MEET") >= pct("low", "FCFS-NQ"))) broken.push_back("(b) MEET<FCFS-NQ@low");
  if (!(pct("low", "FCFS-NQ") >= pct("low", "FCFS"))) broken.push_back("(b) FCFS-NQ<FCFS@low");
  for (const char* m : {"FCFS", "FCFS-NQ", "MECT", "MEET"}) {
    if (pct("medium", m) > pct("low", m)) broken.push_back("(c) " + std::string(m) + " low->medium rises");
    if (pct("high", m) > pct("medium", m)) broken.push_back("(c) " + std::string(m) + " medium->high rises");
  }
  std::string detail = "completion%" + mean_table(s, [](const SummaryCell& c) { return c.completion_pct; });
  if (!broken.empty()) {
    detail += "; violated:";
    for (const auto& b : broken) detail += " " + b;
  }
  return {broken.empty(), detail};
}

Verdict energy_ordering(const std::vector<SummaryCell>& s) {
  std::vector<std::string> broken;
  auto epc = [&](const std::string& sc, const std::string& m) {
    return cell(s, sc, m).energy_per_completion_mj.value_or(INFINITY);
  };
  for (const auto& scv : kScenarioNames) {
    const std::string sc(scv);
    for (const char* m : {"MECT", "MEET"})
      if (!(epc(sc, m) < epc(sc, "FCFS"))) broken.push_back(std::string(m) + ">=FCFS@" + sc);
  }
  std::string detail = "mJ/completion" + mean_table(s, [](const SummaryCell& c) {
                         return c.energy_per_completion_mj.value_or(NAN);
                       });
  for (const auto& b : broken) detail += " violated " + b;
  return {broken.empty(), detail};
}

Verdict degenerate_equivalence() {
  auto doc = nlohmann::json::parse(default_preset_document());
  doc["machine_types"] = nlohmann::json::array({doc["machine_types"][1]});
  doc["machine_types"][0]["replicas"] = 1;
  const auto cfg = parse_config(doc.dump());
  std::mt19937_64 rng(77);
  for (int i = 0; i < kDegenerateWorkloads; ++i) {
    const auto tasks = testing_support::random_workload(cfg, rng, 30);
    std::vector<std::vector<std::int64_t>> completed;
    for (auto m : {SchedulingMethod::FCFS, SchedulingMethod::MECT, SchedulingMethod::MEET}) {
      const auto c = cfg.with_method(m);
      auto sch = make_scheduler(m, c);
      std::vector<std::int64_t> done;
      for (const auto& r : run_simulation(c, tasks, *sch).records)
        if (r.status == TaskStatus::Completed) done.push_back(r.task.seq);
      completed.push_back(done);
    }
    if (completed[0] != completed[1] || completed[1] != completed[2])
      return {false, "workload " + std::to_string(i) + " completion sets differ"};
  }
  return {true, std::to_string(kDegenerateWorkloads) + " workloads, identical completion sets"};
}

Verdict determinism(BenchPlan plan) {
  const auto base = fs::temp_directory_path() / "hcsim_acceptance";
  fs::remove_all(base);
  plan.jobs = 1;
  write_bench_outputs(run_bench(plan), plan, base / "a");
  write_bench_outputs(run_bench(plan), plan, base / "b");
  plan.jobs = 8;
  write_bench_outputs(run_bench(plan), plan, base / "c");
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "a")) {
    const auto name = entry.path().filename();
    const auto a = cli::read_file(entry.path());
    if (a != cli::read_file(base / "b" / name) || a != cli::read_file(base / "c" / name))
      return {false, name.string() + " differs"};
    ++compared;
  }
  fs::remove_all(base);
  return {compared == 6, std::to_string(compared) + " files byte-identical across 2 sequential + 1 parallel (8 jobs) runs"};
}

Verdict workload_statistics() {
  const auto cfg = default_preset();
  const auto low = *scenario_by_name("low");
  for (std::uint64_t seed : {0ULL, 1ULL, 123ULL}) {
    const auto tasks = generate_workload(low, cfg.task_types(), seed);
    std::map<int, int> per_type;
    for (const auto& t : tasks) {
      ++per_type[t.task_type];
      if (t.deadline != t.arrival + cfg.task_type(t.task_type).slack)
        return {false, "deadline != arrival + slack"};
      if (t.arrival < 0 || t.arrival > 1'000'000) return {false, "arrival outside [0, 1000 ms]"};
    }
    for (const auto& tt : cfg.task_types())
      if (per_type[tt.id] != 700) return {false, tt.name + " count " + std::to_string(per_type[tt.id])};
  }

  auto draws = [](ArrivalDistribution d, std::uint64_t key) {
    auto rng = Rng::substream(42, key);
    std::vector<double> v;
    for (int i = 0; i < kDistributionDraws; ++i)
      v.push_back(static_cast<double>(sample_arrival(d, 0, 1'000'000, rng)));
    return v;
  };
  auto mean_sd = [](const std::vector<double>& v) {
    double m = 0, s = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, std::sqrt(s / static_cast<double>(v.size() - 1))};
  };

  auto normal = draws(ArrivalDistribution::Normal, 1);
  const auto [nm, nsd] = mean_sd(normal);
  auto expo = draws(ArrivalDistribution::Exponential, 2);
  std::nth_element(expo.begin(), expo.begin() + kDistributionDraws / 2, expo.end());
  const double median = expo[kDistributionDraws / 2];
  const auto uni = draws(ArrivalDistribution::Uniform, 3);
  std::vector<int> bins(10, 0);
  for (double x : uni) ++bins[std::min(9, static_cast<int>(x / 100'000.0))];
  double chi2 = 0;
  const double expected = kDistributionDraws / 10.0;
  for (int b : bins) chi2 += (b - expected) * (b - expected) / expected;

  // The clamp to [0, 1000 ms] trims ~0.3% of the normal's tails, so its sd
  // sits slightly under 1000/6 ms.
  const bool ok = std::abs(nm - 500'000.0) < kNormalMeanTolUs &&
                  std::abs(nsd - 1'000'000.0 / 6.0) < kNormalSdTolUs &&
                  std::abs(median - std::log(2.0) * 1'000'000.0 / 3.0) < kExpMedianTolUs &&
                  chi2 < kUniformChi2Critical;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "700/type, exact deadlines, window ok; normal mean %.0f sd %.0f us, exp median %.0f us, "
                "uniform chi2 %.2f (< %.2f)",
                nm, nsd, median, chi2, kUniformChi2Critical);
  return {ok, buf};
}

}  // namespace

int main() {
  const BenchPlan plan;  // 3 scenarios x 4 schedulers x seeds 0..9, preset config
  const auto t0 = std::chrono::steady_clock::now();
  const auto bench = run_bench(plan);
  const double bench_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto summary = summarize(bench.reports);

  report(1, "ledger exactness", ledger(plan));
  report(2, "oracle equivalence", oracle_equivalence());
  report(3, "MEET funneling", meet_funneling(plan));
  report(4, "CPU futility", cpu_futility(bench, plan));
  auto v5 = completion_orderings(summary);
  char grid[96];
  std::snprintf(grid, sizeof grid, "; grid %zu runs in %.2f s", bench.reports.size(), bench_secs);
  v5.detail += grid;
  report(5, "completion orderings", v5);
  report(6, "energy per completion ordering", energy_ordering(summary));
  report(7, "degenerate equivalence", degenerate_equivalence());
  report(8, "determinism", determinism(plan));
  report(9, "workload statistics", workload_statistics());

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
