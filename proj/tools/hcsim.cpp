// hcsim: workload generation, single simulation runs and the benchmark grid.

#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "hcsim/cli.hpp"

namespace cli = hcsim::cli;

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous task scheduling simulator"};
  app.require_subcommand(1);

  cli::GenWorkloadOptions gen;
  std::string gen_config;
  auto* gen_cmd = app.add_subcommand("gen-workload", "Generate a scenario workload CSV");
  gen_cmd->add_option("--scenario", gen.scenario, "low, medium or high")->required();
  gen_cmd->add_option("--seed", gen.seed, "RNG seed")->default_val(0);
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();
  gen_cmd->add_option("--config", gen_config, "Config document (default: built-in preset)");

  cli::SimulateOptions sim;
  std::string sim_config, sim_scheduler, sim_out, sim_trace, sim_scenario;
  auto* sim_cmd = app.add_subcommand("simulate", "Run one simulation and write a report");
  sim_cmd->add_option("--config", sim_config, "Config document (default: built-in preset)");
  sim_cmd->add_option("--workload", sim.workload, "Workload CSV")->required();
  sim_cmd->add_option("--scheduler", sim_scheduler, "Override the config's scheduling_method");
  sim_cmd->add_option("--out", sim_out, "Report path (.csv for a CSV row, otherwise JSON)");
  sim_cmd->add_option("--trace", sim_trace, "Write the processed-event trace here");
  sim_cmd->add_option("--scenario", sim_scenario, "Scenario label for the report");
  sim_cmd->add_option("--seed", sim.seed, "Seed label for the report")->default_val(0);

  cli::BenchOptions bench;
  std::string bench_config, bench_scenarios = "low,medium,high",
                            bench_schedulers = "FCFS,FCFS-NQ,MECT,MEET", bench_seeds = "0..9";
  unsigned bench_jobs = 1;
  auto* bench_cmd = app.add_subcommand("bench", "Run the scenario x scheduler x seed grid");
  bench_cmd->add_option("--config", bench_config, "Config document (default: built-in preset)");
  bench_cmd->add_option("--scenario,--scenarios", bench_scenarios, "Comma-separated scenarios")
      ->capture_default_str();
  bench_cmd->add_option("--scheduler,--schedulers", bench_schedulers,
                        "Comma-separated schedulers")
      ->capture_default_str();
  bench_cmd->add_option("--seeds,--seed", bench_seeds, "Seeds: list and/or ranges, e.g. 0..9")
      ->capture_default_str();
  bench_cmd->add_option("--jobs", bench_jobs, "Parallel runs (0 = hardware threads)")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kUsage;
  }

  auto opt_path = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };
  auto opt_str = [](const std::string& s) -> std::optional<std::string> {
    if (s.empty()) return std::nullopt;
    return s;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, ','))
      if (!p.empty()) parts.push_back(p);
    return parts;
  };

  if (*gen_cmd) {
    gen.config = opt_path(gen_config);
    return cli::guarded([&] { return cli::cmd_gen_workload(gen); });
  }
  if (*sim_cmd) {
    sim.config = opt_path(sim_config);
    sim.scheduler = opt_str(sim_scheduler);
    sim.out = opt_path(sim_out);
    sim.trace = opt_path(sim_trace);
    sim.scenario = opt_str(sim_scenario);
    return cli::guarded([&] { return cli::cmd_simulate(sim); });
  }
  return cli::guarded([&] {
    bench.plan.config = cli::load_config(opt_path(bench_config));
    bench.plan.scenarios.clear();
    for (const auto& s : split(bench_scenarios)) bench.plan.scenarios.push_back(cli::require_scenario(s).name);
    bench.plan.schedulers.clear();
    for (const auto& s : split(bench_schedulers)) bench.plan.schedulers.push_back(cli::require_method(s));
    bench.plan.seeds = cli::parse_seeds(bench_seeds);
    bench.plan.jobs = bench_jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : bench_jobs;
    return cli::cmd_bench(bench);
  });
}
