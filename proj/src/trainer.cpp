#include "replaymem/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>
#include <memory>
#include <numeric>

namespace replaymem {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  explicit Stopwatch(double& sink) : sink_(sink), start_(Clock::now()) {}
  ~Stopwatch() { sink_ += std::chrono::duration<double>(Clock::now() - start_).count(); }
  Stopwatch(const Stopwatch&) = delete;
  Stopwatch& operator=(const Stopwatch&) = delete;

 private:
  double& sink_;
  Clock::time_point start_;
};

Rng derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string RunKey::run_id() const {
  return std::string(to_string(policy)) + "_c" + shortest(capacity_fraction) + "_o" + order +
         "_s" + std::to_string(seed);
}

std::size_t total_classes(std::span<const TaskDataset> tasks) {
  std::size_t n = 0;
  for (const auto& t : tasks) n = std::max<std::size_t>(n, t.class_offset + t.class_count);
  return n;
}

std::optional<double> evaluate_task(const Learner& learner, std::span<const Example> test) {
  if (test.empty()) return std::nullopt;
  constexpr std::size_t kChunk = 256;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); i += kChunk) {
    auto chunk = test.subspan(i, std::min(kChunk, test.size() - i));
    const auto probs = learner.predict_proba(chunk);
    for (std::size_t j = 0; j < chunk.size(); ++j)
      if (chunk[j].class_id && argmax(probs[j]) == *chunk[j].class_id) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

NeighborIndex::NeighborIndex(const Learner& learner, const MemoryBuffer& buffer) {
  // Handles are not in insertion order; sort so ties resolve by ordinal.
  std::vector<const MemoryEntry*> entries;
  entries.reserve(buffer.size());
  for (EntryHandle h : buffer.handles()) entries.push_back(&buffer.at(h));
  std::sort(entries.begin(), entries.end(), [](const MemoryEntry* a, const MemoryEntry* b) {
    return a->insert_ordinal < b->insert_ordinal;
  });
  for (const MemoryEntry* e : entries) {
    examples_.push_back(e->example);
    if (e->features && e->features->dim == learner.feature_dim()) {
      features_.push_back(*e->features);
    } else {
      features_.push_back(std::move(learner.features(std::span(&e->example, 1)).front()));
    }
  }
}

std::vector<Example> NeighborIndex::nearest(const SparseVector& query, std::size_t k) const {
  std::vector<std::pair<double, std::size_t>> d(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) d[i] = {squared_distance(query, features_[i]), i};
  k = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<Example> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(examples_[d[i].second]);
  return out;
}

std::vector<double> local_adapt(const Learner& learner, const NeighborIndex& index,
                                const Example& query, const LocalAdaptationParams& params) {
  const SparseVector q = std::move(learner.features(std::span(&query, 1)).front());
  const std::vector<Example> neighbors =
      params.steps == 0 ? std::vector<Example>{} : index.nearest(q, params.k);
  return learner.adapted_proba(neighbors, query, params);
}

std::vector<double> local_adapt(const Learner& learner, const MemoryBuffer& buffer,
                                const Example& query, const LocalAdaptationParams& params) {
  return local_adapt(learner, NeighborIndex(learner, buffer), query, params);
}

std::vector<std::optional<double>> evaluate(const Learner& learner,
                                            std::span<const TaskDataset> tasks,
                                            const MemoryBuffer& buffer,
                                            const std::optional<LocalAdaptationParams>& adaptation) {
  std::vector<std::optional<double>> acc;
  acc.reserve(tasks.size());
  if (!adaptation) {
    for (const auto& t : tasks) acc.push_back(evaluate_task(learner, t.test));
    return acc;
  }
  const NeighborIndex index(learner, buffer);
  for (const auto& t : tasks) {
    if (t.test.empty()) {
      acc.push_back(std::nullopt);
      continue;
    }
    std::size_t correct = 0;
    for (const Example& x : t.test) {
      const auto probs = local_adapt(learner, index, x, *adaptation);
      if (x.class_id && argmax(probs) == *x.class_id) ++correct;
    }
    acc.push_back(static_cast<double>(correct) / static_cast<double>(t.test.size()));
  }
  return acc;
}

ExperimentRecord run_experiment(const ExperimentConfig& config, std::span<const TaskDataset> tasks,
                                Learner& learner, RunObserver* observer) {
  if (tasks.empty()) throw ConfigError("experiment has no tasks");
  if (config.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (config.replay_every == 0) throw ConfigError("replay_every must be positive");

  ExperimentRecord record;
  record.key = RunKey{config.seed, config.order_name, config.policy.kind, config.capacity_fraction};
  std::map<std::uint32_t, std::uint32_t> class_counts;
  std::size_t stream_size = 0;
  for (const auto& t : tasks) {
    record.task_names.push_back(t.name);
    record.task_ids.push_back(t.task_id);
    record.task_classes.push_back(t.class_count);
    class_counts[t.task_id] = t.class_count;
    stream_size += t.train.size();
  }
  if (total_classes(tasks) > learner.class_count()) {
    throw ConfigError("tasks span more classes than the learner predicts");
  }

  MemoryBuffer buffer = MemoryBuffer::from_fraction(config.capacity_fraction, stream_size);
  record.counters.memory_capacity = buffer.capacity();
  std::unique_ptr<Policy> policy =
      make_policy(config.policy, buffer.capacity(), config.batch_size, config.capacity_fraction);

  Rng order_rng = derived_rng(config.seed, 1);
  Rng policy_rng = derived_rng(config.seed, 2);
  Rng replay_rng = derived_rng(config.seed, 3);

  std::uint64_t next_stream_id = 0;
  RunCounters& counters = record.counters;
  PhaseSeconds& secs = record.seconds;

  for (std::size_t pos = 0; pos < tasks.size(); ++pos) {
    std::vector<Example> stream = tasks[pos].train;
    std::shuffle(stream.begin(), stream.end(), order_rng);
    for (Example& x : stream) x.stream_id = next_stream_id++;

    for (std::size_t begin = 0; begin < stream.size(); begin += config.batch_size) {
      const std::span<const Example> batch(stream.data() + begin,
                                           std::min(config.batch_size, stream.size() - begin));
      std::optional<ModelFeedback> feedback;
      if (policy->needs_feedback()) {
        Stopwatch sw(secs.feedback);
        feedback = make_feedback(learner, batch);
      }
      {
        Stopwatch sw(secs.policy);
        policy->observe_batch(buffer, batch, feedback ? &*feedback : nullptr, policy_rng);
      }
      {
        Stopwatch sw(secs.train);
        learner.train_step(batch);
      }
      if (observer) observer->on_new_batch(batch);
      ++counters.new_batches;
      counters.new_examples += batch.size();

      if (counters.new_batches % config.replay_every == 0) {
        Stopwatch sw(secs.replay);
        auto replay = buffer.sample_replay_batch(config.batch_size, replay_rng);
        if (!replay) {
          ++counters.skipped_replays;
          continue;
        }
        learner.train_step(*replay);
        if (observer) observer->on_replay_batch(*replay);
        ++counters.replay_steps;
        counters.replayed_examples += replay->size();
      }
    }

    Checkpoint cp;
    cp.after_task = pos;
    {
      Stopwatch sw(secs.evaluation);
      cp.accuracy = evaluate(learner, tasks, buffer, std::nullopt);
    }
    cp.composition = composition(buffer, class_counts);
    record.checkpoints.push_back(std::move(cp));
    if (observer) observer->on_task_end(pos, buffer);
  }

  if (config.local_adaptation) {
    Stopwatch sw(secs.adaptation);
    record.adapted_accuracy = evaluate(learner, tasks, buffer, config.local_adaptation);
  }
  return record;
}

ExperimentRecord run_experiment(const ExperimentConfig& config, std::span<const TaskDataset> tasks,
                                RunObserver* observer) {
  HashedBowParams params = config.learner;
  params.classes = total_classes(tasks);
  HashedBowLearner learner(params);
  return run_experiment(config, tasks, learner, observer);
}

}  // namespace replaymem
