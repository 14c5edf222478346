#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "replaymem/example.hpp"

namespace replaymem {

using Rng = std::mt19937_64;

/// Stable reference to a stored entry. Stale handles (entry evicted, slot
/// reused) are detected through the generation counter.
struct EntryHandle {
  std::uint32_t slot = 0;
  std::uint32_t generation = 0;

  friend bool operator==(const EntryHandle&, const EntryHandle&) = default;
};

struct MemoryEntry {
  Example example;
  double score = 0.0;
  std::uint64_t insert_ordinal = 0;  // assigned by the buffer
  std::optional<std::uint32_t> batch_slot;
  std::optional<SparseVector> features;
};

struct WriteReceipt {
  EntryHandle handle;
  std::uint64_t insert_ordinal = 0;
};

/// Capacity-bounded episodic memory. Capacity is counted in examples.
///
/// Entries are indexed eagerly by class and by task so composition queries
/// are O(#tasks). The buffer never evicts on its own: a write into a full
/// buffer is rejected and the owning policy has to evict first.
class MemoryBuffer {
 public:
  explicit MemoryBuffer(std::size_t capacity);

  /// Capacity M = floor(fraction * total_stream_size).
  static MemoryBuffer from_fraction(double capacity_fraction, std::size_t total_stream_size);

  [[nodiscard]] std::size_t capacity() const { return capacity_; }
  [[nodiscard]] std::size_t size() const { return live_.size(); }
  [[nodiscard]] bool empty() const { return live_.empty(); }
  [[nodiscard]] bool full() const { return live_.size() >= capacity_; }

  /// Stores `entry`; returns nullopt when the buffer is full.
  std::optional<WriteReceipt> insert(MemoryEntry entry);

  /// Removes and returns the entry. Throws std::logic_error on a stale handle.
  MemoryEntry evict(EntryHandle handle);

  [[nodiscard]] bool contains(EntryHandle handle) const;
  [[nodiscard]] const MemoryEntry& at(EntryHandle handle) const;

  /// Live entries in an unspecified but deterministic order; position i is
  /// valid for i < size().
  [[nodiscard]] const std::vector<EntryHandle>& handles() const { return live_; }
  [[nodiscard]] EntryHandle handle_at(std::size_t position) const { return live_.at(position); }

  [[nodiscard]] const std::map<std::uint32_t, std::vector<EntryHandle>>& class_index() const {
    return by_class_;
  }
  [[nodiscard]] const std::map<std::uint32_t, std::vector<EntryHandle>>& task_index() const {
    return by_task_;
  }
  [[nodiscard]] std::size_t task_count(std::uint32_t task_id) const;
  [[nodiscard]] std::size_t class_count(std::uint32_t class_id) const;

  /// Uniform retrieval: without replacement when size() >= batch_size,
  /// otherwise with replacement. Returns nullopt for an empty buffer.
  [[nodiscard]] std::optional<std::vector<Example>> sample_replay_batch(std::size_t batch_size,
                                                                        Rng& rng) const;

 private:
  struct Slot {
    std::optional<MemoryEntry> entry;
    std::uint32_t generation = 0;
    std::size_t live_pos = 0;
    std::size_t class_pos = 0;
    std::size_t task_pos = 0;
  };

  Slot& checked_slot(EntryHandle handle);
  const Slot& checked_slot(EntryHandle handle) const;
  void unlink(std::vector<EntryHandle>& list, std::size_t pos,
              std::size_t Slot::*member);

  std::size_t capacity_;
  std::uint64_t next_ordinal_ = 0;
  std::vector<Slot> slots_;
  std::vector<std::uint32_t> free_slots_;
  std::vector<EntryHandle> live_;
  std::map<std::uint32_t, std::vector<EntryHandle>> by_class_;
  std::map<std::uint32_t, std::vector<EntryHandle>> by_task_;
};

/// Per-task share of the memory.
struct TaskShare {
  std::size_t count = 0;
  std::uint32_t classes = 1;
  double raw_fraction = 0.0;
  double normalized_share = 0.0;  // class-normalized
};

struct CompositionReport {
  std::size_t total = 0;
  std::map<std::uint32_t, TaskShare> tasks;
};

/// Raw fraction count_t/|entries| and class-normalized share
/// (count_t/classes_t) / sum_u(count_u/classes_u). Every task listed in
/// `class_counts` appears in the report; an empty buffer yields all zeros.
CompositionReport composition(const MemoryBuffer& buffer,
                              const std::map<std::uint32_t, std::uint32_t>& class_counts);

}  // namespace replaymem
