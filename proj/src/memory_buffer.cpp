#include "replaymem/memory_buffer.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace replaymem {

MemoryBuffer::MemoryBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("memory capacity must be at least one example");
}

MemoryBuffer MemoryBuffer::from_fraction(double capacity_fraction, std::size_t total_stream_size) {
  if (!(capacity_fraction > 0.0 && capacity_fraction <= 1.0)) {
    throw ConfigError("capacity_fraction must lie in (0, 1], got " +
                      std::to_string(capacity_fraction));
  }
  if (total_stream_size == 0) throw ConfigError("total stream size must be at least 1");
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  const auto m = static_cast<std::size_t>(
      std::floor(capacity_fraction * static_cast<double>(total_stream_size) + 1e-9));
  if (m == 0) {
    throw ConfigError("capacity fraction " + std::to_string(capacity_fraction) + " of " +
                      std::to_string(total_stream_size) + " examples rounds to zero");
  }
  return MemoryBuffer(m);
}

std::optional<WriteReceipt> MemoryBuffer::insert(MemoryEntry entry) {
  if (full()) return std::nullopt;

  std::uint32_t slot_id;
  if (!free_slots_.empty()) {
    slot_id = free_slots_.back();
    free_slots_.pop_back();
  } else {
    slot_id = static_cast<std::uint32_t>(slots_.size());
    slots_.emplace_back();
  }
  Slot& slot = slots_[slot_id];
  const EntryHandle handle{slot_id, slot.generation};

  entry.insert_ordinal = next_ordinal_++;
  slot.live_pos = live_.size();
  live_.push_back(handle);
  if (entry.example.class_id) {
    auto& list = by_class_[*entry.example.class_id];
    slot.class_pos = list.size();
    list.push_back(handle);
  }
  auto& tasks = by_task_[entry.example.task_id];
  slot.task_pos = tasks.size();
  tasks.push_back(handle);

  const std::uint64_t ordinal = entry.insert_ordinal;
  slot.entry = std::move(entry);
  return WriteReceipt{handle, ordinal};
}

void MemoryBuffer::unlink(std::vector<EntryHandle>& list, std::size_t pos,
                          std::size_t Slot::*member) {
  const EntryHandle moved = list.back();
  list[pos] = moved;
  slots_[moved.slot].*member = pos;
  list.pop_back();
}

MemoryEntry MemoryBuffer::evict(EntryHandle handle) {
  Slot& slot = checked_slot(handle);
  MemoryEntry out = std::move(*slot.entry);
  slot.entry.reset();

  unlink(live_, slot.live_pos, &Slot::live_pos);
  if (out.example.class_id) {
    auto it = by_class_.find(*out.example.class_id);
    unlink(it->second, slot.class_pos, &Slot::class_pos);
    if (it->second.empty()) by_class_.erase(it);
  }
  auto it = by_task_.find(out.example.task_id);
  unlink(it->second, slot.task_pos, &Slot::task_pos);
  if (it->second.empty()) by_task_.erase(it);

  ++slot.generation;
  free_slots_.push_back(handle.slot);
  return out;
}

bool MemoryBuffer::contains(EntryHandle handle) const {
  return handle.slot < slots_.size() && slots_[handle.slot].generation == handle.generation &&
         slots_[handle.slot].entry.has_value();
}

const MemoryEntry& MemoryBuffer::at(EntryHandle handle) const { return *checked_slot(handle).entry; }

MemoryBuffer::Slot& MemoryBuffer::checked_slot(EntryHandle handle) {
  if (!contains(handle)) throw std::logic_error("dangling memory entry reference");
  return slots_[handle.slot];
}

const MemoryBuffer::Slot& MemoryBuffer::checked_slot(EntryHandle handle) const {
  if (!contains(handle)) throw std::logic_error("dangling memory entry reference");
  return slots_[handle.slot];
}

std::size_t MemoryBuffer::task_count(std::uint32_t task_id) const {
  auto it = by_task_.find(task_id);
  return it == by_task_.end() ? 0 : it->second.size();
}

std::size_t MemoryBuffer::class_count(std::uint32_t class_id) const {
  auto it = by_class_.find(class_id);
  return it == by_class_.end() ? 0 : it->second.size();
}

std::optional<std::vector<Example>> MemoryBuffer::sample_replay_batch(std::size_t batch_size,
                                                                      Rng& rng) const {
  if (live_.empty()) return std::nullopt;
  std::vector<Example> batch;
  batch.reserve(batch_size);
  const std::size_t n = live_.size();
  if (n >= batch_size) {
    // Partial Fisher-Yates over positions.
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    for (std::size_t i = 0; i < batch_size; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(pos[i], pos[pick(rng)]);
      batch.push_back(at(live_[pos[i]]).example);
    }
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(at(live_[pick(rng)]).example);
  }
  return batch;
}

CompositionReport composition(const MemoryBuffer& buffer,
                              const std::map<std::uint32_t, std::uint32_t>& class_counts) {
  CompositionReport report;
  report.total = buffer.size();
  for (const auto& [task, classes] : class_counts) {
    if (classes == 0) throw std::invalid_argument("task with zero classes in composition");
    report.tasks[task].classes = classes;
  }
  for (const auto& [task, members] : buffer.task_index()) {
    auto it = class_counts.find(task);
    if (it == class_counts.end()) {
      throw std::invalid_argument("memory holds task " + std::to_string(task) +
                                  " with no class count");
    }
    report.tasks[task].count = members.size();
  }
  if (report.total == 0) return report;

  double density_sum = 0.0;
  for (const auto& [task, share] : report.tasks) {
    density_sum += static_cast<double>(share.count) / share.classes;
  }
  for (auto& [task, share] : report.tasks) {
    share.raw_fraction = static_cast<double>(share.count) / static_cast<double>(report.total);
    share.normalized_share = static_cast<double>(share.count) / share.classes / density_sum;
  }
  return report;
}

}  // namespace replaymem
