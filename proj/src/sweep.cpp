#include "replaymem/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

#include "replaymem/metrics.hpp"

namespace replaymem {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty item in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

struct Unit {
  ExperimentConfig config;
  const std::vector<TaskDataset>* tasks = nullptr;
  std::string run_id;
};

}  // namespace

std::vector<double> parse_capacity_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_commas(text)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("capacity '" + item + "' is not a number");
    if (!(v > 0.0 && v <= 1.0)) throw ConfigError("capacity " + item + " outside (0, 1]");
    out.push_back(v);
  }
  return out;
}

std::vector<PolicyKind> parse_policy_list(const std::string& text) {
  if (text == "all") return all_policy_kinds();
  std::vector<PolicyKind> out;
  for (const auto& item : split_commas(text)) out.push_back(parse_policy_kind(item));
  return out;
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("REPLAYMEM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

bool run_key_less(const RunKey& a, const RunKey& b) {
  return std::make_tuple(to_string(a.policy), a.capacity_fraction, a.order, a.seed) <
         std::make_tuple(to_string(b.policy), b.capacity_fraction, b.order, b.seed);
}

SweepResult run_sweep(const SweepPlan& plan, const std::filesystem::path& base_dir,
                      std::size_t threads) {
  const ExperimentConfig& base = plan.base.experiment;
  const auto capacities = plan.capacities.empty() ? std::vector<double>{base.capacity_fraction}
                                                  : plan.capacities;
  const auto seeds = plan.seeds.empty() ? std::vector<std::uint64_t>{base.seed} : plan.seeds;
  const auto policies =
      plan.policies.empty() ? std::vector<PolicyKind>{base.policy.kind} : plan.policies;
  const auto orders = plan.orders.empty() ? std::vector<std::string>{plan.base.order} : plan.orders;

  // Data is loaded once per order and shared read-only by the runs.
  std::map<std::string, LoadedExperiment> loaded;
  for (const auto& order : orders) {
    RunConfig rc = plan.base;
    if (plan.orders.empty() && !rc.task_order.empty()) {
      loaded.emplace(order, load_experiment(rc, base_dir));
      continue;
    }
    rc.order = order;
    rc.task_order.clear();
    loaded.emplace(order, load_experiment(rc, base_dir));
  }

  std::vector<Unit> units;
  for (const auto& order : orders) {
    const LoadedExperiment& le = loaded.at(order);
    for (PolicyKind policy : policies) {
      for (double cap : capacities) {
        for (std::uint64_t seed : seeds) {
          Unit u;
          u.config = le.config;
          u.config.policy.kind = policy;
          u.config.capacity_fraction = cap;
          u.config.seed = seed;
          u.tasks = &le.tasks;
          u.run_id = RunKey{seed, u.config.order_name, policy, cap}.run_id();
          units.push_back(std::move(u));
        }
      }
    }
  }

  {
    std::vector<std::string> ids;
    for (const auto& u : units) ids.push_back(u.run_id);
    std::sort(ids.begin(), ids.end());
    if (auto it = std::adjacent_find(ids.begin(), ids.end()); it != ids.end())
      throw ConfigError("sweep lists run '" + *it + "' twice");
  }

  std::vector<std::optional<ExperimentRecord>> results(units.size());
  std::vector<std::string> errors(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      try {
        results[i] = run_experiment(units[i].config, *units[i].tasks);
      } catch (const std::exception& e) {
        errors[i] = e.what();
        if (errors[i].empty()) errors[i] = "unknown error";
      } catch (...) {
        errors[i] = "unknown error";
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, units.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (results[i]) {
      out.records.push_back(std::move(*results[i]));
    } else {
      out.failures.push_back({units[i].run_id, errors[i]});
    }
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const ExperimentRecord& a, const ExperimentRecord& b) { return run_key_less(a.key, b.key); });
  std::sort(out.failures.begin(), out.failures.end(),
            [](const SweepFailure& a, const SweepFailure& b) { return a.run_id < b.run_id; });
  return out;
}

void write_run_outputs(const std::vector<ExperimentRecord>& records,
                       const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ofstream rec(out_dir / "records.csv", std::ios::binary);
  std::ofstream tim(out_dir / "timing.csv", std::ios::binary);
  if (!rec || !tim) throw DataError("cannot write outputs under '" + out_dir.string() + "'");
  write_record_header(rec);
  write_timing_header(tim);
  for (const auto& r : records) {
    write_record_rows(rec, r);
    write_timing_row(tim, r);
  }
  if (!rec || !tim) throw DataError("write error under '" + out_dir.string() + "'");
}

}  // namespace replaymem
