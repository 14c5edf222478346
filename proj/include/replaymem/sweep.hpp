#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "replaymem/config.hpp"
#include "replaymem/trainer.hpp"

namespace replaymem {

/// Cross-product of runs over one base configuration.
struct SweepPlan {
  RunConfig base;
  std::vector<double> capacities;       // empty: the base capacity only
  std::vector<std::uint64_t> seeds;     // empty: the base seed only
  std::vector<PolicyKind> policies;     // empty: the base policy only
  std::vector<std::string> orders;      // empty: the base order only
};

struct SweepFailure {
  std::string run_id;
  std::string message;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;  // sorted by run key
  std::vector<SweepFailure> failures;     // sorted by run id
};

/// "0.1,0.3" -> {0.1, 0.3}; throws ConfigError on junk or an empty list.
std::vector<double> parse_capacity_list(const std::string& text);
/// "all" or a comma-separated list of policy names.
std::vector<PolicyKind> parse_policy_list(const std::string& text);
/// Seeds 0..n-1.
std::vector<std::uint64_t> seed_range(std::uint64_t n);

/// Worker count: REPLAYMEM_THREADS when set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t sweep_threads();

/// Loads every order's tasks once (relative to `base_dir`), then executes the
/// runs on `threads` workers. Each run owns its learner and memory; a run
/// that throws is reported in `failures` and does not stop the others.
/// Configuration problems found before any run starts still throw.
SweepResult run_sweep(const SweepPlan& plan, const std::filesystem::path& base_dir,
                      std::size_t threads);

/// Orders runs by (policy, capacity, order, seed); this is the merge order of
/// every sweep output.
bool run_key_less(const RunKey& a, const RunKey& b);

/// records.csv and timing.csv under `out_dir` (created if needed).
void write_run_outputs(const std::vector<ExperimentRecord>& records,
                       const std::filesystem::path& out_dir);

}  // namespace replaymem
