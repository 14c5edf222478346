#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "replaymem/example.hpp"
#include "replaymem/memory_buffer.hpp"

namespace replaymem {

enum class PolicyKind { NaiveRandom, Reservoir, RingBuffer, Surprise, MinMargin, MaxLoss, MeanOfFeatures };

/// Which example attribute partitions class-based policies.
enum class KeyMode { Class, Task };

std::string_view to_string(PolicyKind kind);
std::string_view to_string(KeyMode mode);
PolicyKind parse_policy_kind(std::string_view name);
KeyMode parse_key_mode(std::string_view name);
const std::vector<PolicyKind>& all_policy_kinds();

/// Model outputs for one incoming batch, computed before the batch's update.
struct ModelFeedback {
  std::vector<std::vector<double>> probs;  // rows over the global classes
  std::vector<double> per_example_loss;
  double batch_mean_loss = 0.0;
  std::vector<SparseVector> features;
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::Reservoir;
  KeyMode key_mode = KeyMode::Class;
  /// Naive Random admission probability; defaults to the capacity fraction.
  std::optional<double> store_probability;

  friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

/// A memory-population strategy. The policy is the only writer of the buffer
/// it observes into; mixing writers breaks the policy's bookkeeping.
class Policy {
 public:
  virtual ~Policy() = default;

  [[nodiscard]] virtual PolicyKind kind() const = 0;
  [[nodiscard]] virtual bool needs_feedback() const { return false; }

  /// Offers one stream batch to the memory. A null `feedback` is only
  /// accepted by the feedback-free policies.
  void observe_batch(MemoryBuffer& buffer, std::span<const Example> batch,
                     const ModelFeedback* feedback, Rng& rng);

 protected:
  virtual void step(MemoryBuffer& buffer, std::span<const Example> batch,
                    const ModelFeedback* feedback, Rng& rng) = 0;
};

class NaiveRandomPolicy final : public Policy {
 public:
  explicit NaiveRandomPolicy(double store_probability);
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::NaiveRandom; }
  [[nodiscard]] double store_probability() const { return p_; }

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  double p_;
};

/// Algorithm R: the N-th example enters a full memory with probability M/N.
class ReservoirPolicy final : public Policy {
 public:
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::Reservoir; }
  [[nodiscard]] std::uint64_t seen() const { return seen_; }

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  std::uint64_t seen_ = 0;
};

/// Per-key FIFO queues with quota floor(M / keys discovered so far).
/// Remainder slots (M mod keys) stay unused.
class RingBufferPolicy final : public Policy {
 public:
  explicit RingBufferPolicy(KeyMode mode) : mode_(mode) {}
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::RingBuffer; }
  [[nodiscard]] std::size_t quota() const { return quota_; }
  [[nodiscard]] const std::map<std::uint32_t, std::deque<EntryHandle>>& queues() const {
    return queues_;
  }

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  KeyMode mode_;
  std::size_t quota_ = 0;
  std::map<std::uint32_t, std::deque<EntryHandle>> queues_;
};

/// Shared machinery for policies that keep the best-scored single examples.
/// Entries are ordered by (rank score, insert ordinal); the front is the next
/// eviction victim.
class ScoredPolicy : public Policy {
 public:
  [[nodiscard]] bool needs_feedback() const override { return true; }

 protected:
  /// Inserts or replaces the front entry when `rank` beats it strictly.
  void offer(MemoryBuffer& buffer, const Example& example, double score, double rank);
  [[nodiscard]] std::optional<double> front_rank() const;

 private:
  std::set<std::pair<double, std::uint64_t>> order_;
  std::map<std::uint64_t, EntryHandle> by_ordinal_;
};

/// Batch entropy H_t (nats, averaged over examples); every example in the
/// batch is scored with s_t = H_t - H_{t-1}, where H_0 = 0.
class SurprisePolicy final : public ScoredPolicy {
 public:
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::Surprise; }
  [[nodiscard]] double previous_entropy() const { return prev_entropy_; }
  [[nodiscard]] std::optional<double> min_stored_score() const { return front_rank(); }

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  double prev_entropy_ = 0.0;
};

/// Keeps the smallest margins p_true - max_{c != true} p_c.
class MinMarginPolicy final : public ScoredPolicy {
 public:
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::MinMargin; }
  [[nodiscard]] std::optional<double> max_stored_margin() const;

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;
};

/// Stores whole batches in floor(M / batch_size) slots scored by the batch
/// mean loss; the lowest-loss slot is overwritten by a strictly higher one.
class MaxLossPolicy final : public Policy {
 public:
  MaxLossPolicy(std::size_t capacity, std::size_t batch_size);
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::MaxLoss; }
  [[nodiscard]] bool needs_feedback() const override { return true; }

  struct Slot {
    bool used = false;
    double score = 0.0;
    std::vector<EntryHandle> members;
  };
  [[nodiscard]] const std::vector<Slot>& slots() const { return slots_; }
  [[nodiscard]] std::optional<double> min_stored_score() const;

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  std::size_t batch_size_;
  std::vector<Slot> slots_;
};

/// Mean of Features: keeps, per key, the members closest to the key's mean
/// feature vector. Means are recomputed exactly from members after every
/// mutation of that key.
class MeanOfFeaturesPolicy final : public Policy {
 public:
  explicit MeanOfFeaturesPolicy(KeyMode mode) : mode_(mode) {}
  [[nodiscard]] PolicyKind kind() const override { return PolicyKind::MeanOfFeatures; }
  [[nodiscard]] bool needs_feedback() const override { return true; }

  struct KeyState {
    std::vector<EntryHandle> members;
    std::vector<double> mean;             // dense, dimension d
    std::vector<std::uint32_t> support;   // indices where mean may be nonzero
    double mean_squared_norm = 0.0;
  };
  [[nodiscard]] const std::map<std::uint32_t, KeyState>& keys() const { return keys_; }

 protected:
  void step(MemoryBuffer&, std::span<const Example>, const ModelFeedback*, Rng&) override;

 private:
  void recompute_mean(const MemoryBuffer& buffer, KeyState& state) const;
  /// Position in `state.members` of the member farthest from the mean, and
  /// its Euclidean distance.
  std::pair<std::size_t, double> farthest_member(const MemoryBuffer& buffer,
                                                 const KeyState& state) const;
  void evict_farthest_from_largest_key(MemoryBuffer& buffer);
  void admit(MemoryBuffer& buffer, std::uint32_t key, const Example& example,
             const SparseVector& features);

  KeyMode mode_;
  std::uint32_t dim_ = 0;
  std::map<std::uint32_t, KeyState> keys_;
};

/// Builds the policy for a run. `capacity` is M and `batch_size` the training
/// batch size (used for Max Loss slots); `capacity_fraction` is the Naive
/// Random default admission probability.
std::unique_ptr<Policy> make_policy(const PolicyConfig& config, std::size_t capacity,
                                    std::size_t batch_size, double capacity_fraction);

/// Key used by class-based policies; throws ConfigError for a class-free
/// example in class mode.
std::uint32_t policy_key(const Example& example, KeyMode mode);

/// Mean predictive entropy of the rows, in nats.
double mean_entropy(const std::vector<std::vector<double>>& probs);

/// p_true - max over other classes (p_true when there is no other class).
double margin(std::span<const double> probs, std::uint32_t true_class);

}  // namespace replaymem
