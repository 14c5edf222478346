#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "replaymem/example.hpp"
#include "replaymem/learner.hpp"
#include "replaymem/memory_buffer.hpp"
#include "replaymem/policies.hpp"

namespace replaymem {

/// One task of the stream with its held-out split. Class ids are global.
struct TaskDataset {
  std::string name;
  std::uint32_t task_id = 0;
  std::uint32_t class_count = 1;
  std::uint32_t class_offset = 0;
  std::vector<Example> train;
  std::vector<Example> test;
};

struct ExperimentConfig {
  std::string order_name = "custom";
  std::vector<std::string> task_order;
  double capacity_fraction = 0.10;
  std::size_t replay_every = 100;  // one replay batch per this many new batches
  std::size_t batch_size = 32;
  PolicyConfig policy;
  HashedBowParams learner;  // `classes` is derived from the tasks
  std::uint64_t seed = 0;
  std::optional<LocalAdaptationParams> local_adaptation;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct RunKey {
  std::uint64_t seed = 0;
  std::string order;
  PolicyKind policy = PolicyKind::Reservoir;
  double capacity_fraction = 0.0;

  /// "<policy>_c<capacity>_o<order>_s<seed>", unique within a sweep.
  [[nodiscard]] std::string run_id() const;
};

/// Evaluation of every task after the task at stream position `after_task`.
struct Checkpoint {
  std::size_t after_task = 0;
  std::vector<std::optional<double>> accuracy;  // by stream position; nullopt = empty test set
  CompositionReport composition;
};

struct RunCounters {
  std::size_t new_batches = 0;
  std::size_t new_examples = 0;
  std::size_t replay_steps = 0;
  std::size_t replayed_examples = 0;
  std::size_t skipped_replays = 0;  // replay point reached with empty memory
  std::size_t memory_capacity = 0;
};

struct PhaseSeconds {
  double feedback = 0.0;
  double policy = 0.0;
  double train = 0.0;
  double replay = 0.0;
  double evaluation = 0.0;
  double adaptation = 0.0;
  [[nodiscard]] double total() const {
    return feedback + policy + train + replay + evaluation + adaptation;
  }
};

struct ExperimentRecord {
  RunKey key;
  std::vector<std::string> task_names;  // stream order
  std::vector<std::uint32_t> task_ids;
  std::vector<std::uint32_t> task_classes;
  std::vector<Checkpoint> checkpoints;  // one per task, in stream order
  std::optional<std::vector<std::optional<double>>> adapted_accuracy;
  RunCounters counters;
  PhaseSeconds seconds;
};

/// Hooks for instrumentation; the default does nothing.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_new_batch(std::span<const Example>) {}
  virtual void on_replay_batch(std::span<const Example>) {}
  virtual void on_task_end(std::size_t /*position*/, const MemoryBuffer&) {}
};

/// Runs one lifelong-learning experiment over `tasks` (already in stream
/// order). Per batch: feedback under the pre-update model, policy
/// observation, one training step, and every `replay_every`-th batch one
/// replay step from memory. Replayed examples are never offered to the
/// policy. Stream ids are assigned here.
ExperimentRecord run_experiment(const ExperimentConfig& config, std::span<const TaskDataset> tasks,
                                Learner& learner, RunObserver* observer = nullptr);

/// Same, with a fresh HashedBowLearner sized to the tasks' label space.
ExperimentRecord run_experiment(const ExperimentConfig& config, std::span<const TaskDataset> tasks,
                                RunObserver* observer = nullptr);

/// Number of global classes spanned by the tasks.
std::size_t total_classes(std::span<const TaskDataset> tasks);

/// Accuracy of `learner` on one test set; nullopt when the set is empty.
std::optional<double> evaluate_task(const Learner& learner, std::span<const Example> test);

/// Feature cache over a memory snapshot for nearest-neighbor retrieval.
class NeighborIndex {
 public:
  NeighborIndex(const Learner& learner, const MemoryBuffer& buffer);
  [[nodiscard]] std::size_t size() const { return examples_.size(); }
  /// The k entries closest to `query` in Euclidean feature distance, nearest
  /// first; ties resolve by insertion order. Returns everything when k >= size.
  [[nodiscard]] std::vector<Example> nearest(const SparseVector& query, std::size_t k) const;

 private:
  std::vector<Example> examples_;
  std::vector<SparseVector> features_;
};

/// Prediction for `query` after adapting a parameter copy on its K nearest
/// memory neighbors. An empty memory yields the base prediction.
std::vector<double> local_adapt(const Learner& learner, const NeighborIndex& index,
                                const Example& query, const LocalAdaptationParams& params);
std::vector<double> local_adapt(const Learner& learner, const MemoryBuffer& buffer,
                                const Example& query, const LocalAdaptationParams& params);

/// Per-task accuracy (one entry per test set); with `adaptation`, every test
/// example is predicted by a locally adapted copy.
std::vector<std::optional<double>> evaluate(const Learner& learner,
                                            std::span<const TaskDataset> tasks,
                                            const MemoryBuffer& buffer,
                                            const std::optional<LocalAdaptationParams>& adaptation);

}  // namespace replaymem
