// Command-line driver: run, sweep, gen-data, report.
//
// Exit codes: 0 success, 1 configuration/usage error, 2 data or runtime error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "replaymem/config.hpp"
#include "replaymem/metrics.hpp"
#include "replaymem/report.hpp"
#include "replaymem/sweep.hpp"
#include "replaymem/synthetic.hpp"

namespace fs = std::filesystem;
using namespace replaymem;

namespace {

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

fs::path config_dir(const fs::path& config) {
  return config.has_parent_path() ? config.parent_path() : fs::path(".");
}

void print_run_line(const ExperimentRecord& r) {
  const auto acc = final_average_accuracy(r);
  std::printf("%s  final accuracy %s  replay steps %zu  %.2fs\n", r.key.run_id().c_str(),
              acc ? format_number(*acc).c_str() : "n/a", r.counters.replay_steps,
              r.seconds.total());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replay-memory population policies for lifelong text classification"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run one experiment and write records.csv");
  std::string run_config, run_out = "out";
  std::optional<std::uint64_t> run_seed;
  std::optional<std::string> run_policy;
  std::optional<double> run_capacity;
  run->add_option("--config", run_config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory")->capture_default_str();
  run->add_option("--seed", run_seed, "Override the configured seed");
  run->add_option("--policy", run_policy, "Override the configured policy");
  run->add_option("--capacity", run_capacity, "Override the configured capacity fraction");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run the cross-product of capacities, seeds, policies and orders");
  std::string sweep_config, sweep_out = "sweep", sweep_caps, sweep_policies, sweep_orders;
  std::uint64_t sweep_seeds = 0;
  std::optional<std::size_t> sweep_threads_opt;
  sweep->add_option("--config", sweep_config, "Base run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--capacities", sweep_caps, "Comma-separated capacity fractions, e.g. 0.1,0.3,0.5,0.7");
  sweep->add_option("--seeds", sweep_seeds, "Number of seeds (0..n-1); default: the configured seed");
  sweep->add_option("--policies", sweep_policies, "'all' or comma-separated policy names");
  sweep->add_option("--orders", sweep_orders, "'all' or comma-separated order names from the manifest");
  sweep->add_option("--threads", sweep_threads_opt, "Worker threads (default: REPLAYMEM_THREADS or all cores)");
  sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic task stream");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "Generator parameters (JSON)")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // report
  auto* report = app.add_subcommand("report", "Summarise records into tables and SVG charts");
  std::string report_in, report_out, report_config;
  bool print_config = false;
  report->add_option("--in", report_in, "Directory holding records.csv");
  report->add_option("--out", report_out, "Output directory");
  report->add_flag("--print-config", print_config,
                   "Print the configuration with every default spelled out and exit");
  report->add_option("--config", report_config, "With --print-config: resolve this file instead of the defaults")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigExit;
  }

  try {
    if (*run) {
      RunConfig rc = load_run_config(run_config);
      if (run_seed) rc.experiment.seed = *run_seed;
      if (run_policy) rc.experiment.policy.kind = parse_policy_kind(*run_policy);
      if (run_capacity) {
        if (!(*run_capacity > 0.0 && *run_capacity <= 1.0))
          throw ConfigError("--capacity must lie in (0, 1]");
        rc.experiment.capacity_fraction = *run_capacity;
      }
      const auto loaded = load_experiment(rc, config_dir(run_config));
      const auto record = run_experiment(loaded.config, loaded.tasks);
      write_run_outputs({record}, run_out);
      print_run_line(record);
      return 0;
    }

    if (*sweep) {
      SweepPlan plan;
      plan.base = load_run_config(sweep_config);
      if (!sweep_caps.empty()) plan.capacities = parse_capacity_list(sweep_caps);
      if (sweep_seeds > 0) plan.seeds = seed_range(sweep_seeds);
      if (!sweep_policies.empty()) plan.policies = parse_policy_list(sweep_policies);
      if (sweep_orders == "all") {
        const Manifest m = load_manifest(config_dir(sweep_config) / plan.base.manifest);
        for (const auto& [name, seq] : m.orders) plan.orders.push_back(name);
        if (plan.orders.empty()) throw ConfigError("manifest defines no orders");
      } else if (!sweep_orders.empty()) {
        std::stringstream ss(sweep_orders);
        for (std::string item; std::getline(ss, item, ',');) plan.orders.push_back(item);
      }
      const std::size_t threads = sweep_threads_opt.value_or(sweep_threads());
      const SweepResult result = run_sweep(plan, config_dir(sweep_config), threads);
      write_run_outputs(result.records, sweep_out);
      for (const auto& r : result.records) print_run_line(r);
      if (!result.failures.empty()) {
        std::ofstream failures(fs::path(sweep_out) / "failures.csv", std::ios::binary);
        failures << "run_id,message\n";
        for (const auto& f : result.failures) {
          std::string msg = f.message;
          for (char& c : msg)
            if (c == ',' || c == '\n' || c == '\r') c = ' ';
          failures << f.run_id << ',' << msg << '\n';
          std::cerr << "run " << f.run_id << " failed: " << f.message << '\n';
        }
        std::cerr << result.failures.size() << " of "
                  << result.failures.size() + result.records.size() << " runs failed\n";
        return kRuntimeExit;
      }
      return 0;
    }

    if (*gen) {
      std::ifstream in(gen_spec);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + gen_spec + "' is not valid JSON: " + e.what());
      }
      const SyntheticSpec spec = parse_synthetic_spec(j);
      const Manifest m = write_synthetic(spec, gen_out);
      std::printf("wrote %zu tasks to %s\n", m.tasks.size(), gen_out.c_str());
      return 0;
    }

    if (*report) {
      if (print_config) {
        const RunConfig rc = report_config.empty() ? default_run_config() : load_run_config(report_config);
        std::cout << to_json(rc).dump(2) << '\n';
        return 0;
      }
      if (report_in.empty() || report_out.empty())
        throw ConfigError("report needs --in and --out (or --print-config)");
      for (const auto& name : write_report(fs::path(report_in), fs::path(report_out)))
        std::printf("%s\n", (fs::path(report_out) / name).string().c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kRuntimeExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeExit;
  }
  return 0;
}
