#include "replaymem/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace replaymem {

namespace {

constexpr std::pair<PolicyKind, std::string_view> kPolicyNames[] = {
    {PolicyKind::NaiveRandom, "naive_random"},  {PolicyKind::Reservoir, "reservoir"},
    {PolicyKind::RingBuffer, "ring_buffer"},    {PolicyKind::Surprise, "surprise"},
    {PolicyKind::MinMargin, "min_margin"},      {PolicyKind::MaxLoss, "max_loss"},
    {PolicyKind::MeanOfFeatures, "mof"},
};

void require_rows(std::size_t got, std::size_t want, const char* field) {
  if (got != want) {
    throw std::invalid_argument(std::string("model feedback field '") + field + "' has " +
                                std::to_string(got) + " rows for a batch of " +
                                std::to_string(want));
  }
}

MemoryEntry make_entry(const Example& example, double score) {
  MemoryEntry entry;
  entry.example = example;
  entry.score = score;
  return entry;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames)
    if (k == kind) return name;
  return "unknown";
}

std::string_view to_string(KeyMode mode) { return mode == KeyMode::Class ? "class" : "task"; }

PolicyKind parse_policy_kind(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames)
    if (n == name) return k;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

KeyMode parse_key_mode(std::string_view name) {
  if (name == "class") return KeyMode::Class;
  if (name == "task") return KeyMode::Task;
  throw ConfigError("unknown key mode '" + std::string(name) + "' (expected class or task)");
}

const std::vector<PolicyKind>& all_policy_kinds() {
  static const std::vector<PolicyKind> kinds = [] {
    std::vector<PolicyKind> out;
    for (const auto& [k, name] : kPolicyNames) out.push_back(k);
    return out;
  }();
  return kinds;
}

std::uint32_t policy_key(const Example& example, KeyMode mode) {
  if (mode == KeyMode::Task) return example.task_id;
  if (!example.class_id) {
    throw ConfigError("example " + std::to_string(example.stream_id) +
                      " has no class label; use key_mode \"task\" for class-free tasks");
  }
  return *example.class_id;
}

double mean_entropy(const std::vector<std::vector<double>>& probs) {
  if (probs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& row : probs) {
    double h = 0.0;
    for (double p : row)
      if (p > 0.0) h -= p * std::log(p);
    total += h;
  }
  return total / static_cast<double>(probs.size());
}

double margin(std::span<const double> probs, std::uint32_t true_class) {
  if (true_class >= probs.size()) throw std::out_of_range("true class outside probability row");
  double best_other = 0.0;
  bool any_other = false;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (c == true_class) continue;
    best_other = any_other ? std::max(best_other, probs[c]) : probs[c];
    any_other = true;
  }
  return probs[true_class] - best_other;
}

void Policy::observe_batch(MemoryBuffer& buffer, std::span<const Example> batch,
                           const ModelFeedback* feedback, Rng& rng) {
  if (batch.empty()) return;
  if (needs_feedback() && feedback == nullptr) {
    throw ConfigError("policy '" + std::string(to_string(kind())) + "' requires model feedback");
  }
  step(buffer, batch, feedback, rng);
}

// --- Naive Random -----------------------------------------------------------

NaiveRandomPolicy::NaiveRandomPolicy(double store_probability) : p_(store_probability) {
  if (!(p_ >= 0.0 && p_ <= 1.0)) throw ConfigError("store_probability must lie in [0, 1]");
}

void NaiveRandomPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                             const ModelFeedback*, Rng& rng) {
  std::bernoulli_distribution admit(p_);
  for (const Example& x : batch) {
    if (!admit(rng)) continue;
    if (buffer.full()) {
      std::uniform_int_distribution<std::size_t> victim(0, buffer.size() - 1);
      buffer.evict(buffer.handle_at(victim(rng)));
    }
    buffer.insert(make_entry(x, 0.0));
  }
}

// --- Reservoir --------------------------------------------------------------

void ReservoirPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                           const ModelFeedback*, Rng& rng) {
  for (const Example& x : batch) {
    ++seen_;
    if (!buffer.full()) {
      buffer.insert(make_entry(x, 0.0));
      continue;
    }
    // j < M happens with probability M/N and then names a uniform victim.
    std::uniform_int_distribution<std::uint64_t> draw(0, seen_ - 1);
    const std::uint64_t j = draw(rng);
    if (j < buffer.size()) {
      buffer.evict(buffer.handle_at(static_cast<std::size_t>(j)));
      buffer.insert(make_entry(x, 0.0));
    }
  }
}

// --- Ring Buffer ------------------------------------------------------------

void RingBufferPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                            const ModelFeedback*, Rng&) {
  for (const Example& x : batch) {
    const std::uint32_t key = policy_key(x, mode_);
    auto it = queues_.find(key);
    if (it == queues_.end()) {
      it = queues_.emplace(key, std::deque<EntryHandle>{}).first;
      quota_ = buffer.capacity() / queues_.size();
      for (auto& [k, queue] : queues_) {
        while (queue.size() > quota_) {
          buffer.evict(queue.front());
          queue.pop_front();
        }
      }
    }
    if (quota_ == 0) continue;
    auto& queue = it->second;
    if (queue.size() >= quota_) {
      buffer.evict(queue.front());
      queue.pop_front();
    }
    auto receipt = buffer.insert(make_entry(x, 0.0));
    if (!receipt) throw std::logic_error("ring buffer quota exceeded memory capacity");
    queue.push_back(receipt->handle);
  }
}

// --- Score-ordered policies -------------------------------------------------

void ScoredPolicy::offer(MemoryBuffer& buffer, const Example& example, double score, double rank) {
  if (buffer.full()) {
    auto front = order_.begin();
    if (front == order_.end() || !(rank > front->first)) return;
    buffer.evict(by_ordinal_.at(front->second));
    by_ordinal_.erase(front->second);
    order_.erase(front);
  }
  auto receipt = buffer.insert(make_entry(example, score));
  if (!receipt) throw std::logic_error("scored policy found the memory full after eviction");
  order_.emplace(rank, receipt->insert_ordinal);
  by_ordinal_.emplace(receipt->insert_ordinal, receipt->handle);
}

std::optional<double> ScoredPolicy::front_rank() const {
  if (order_.empty()) return std::nullopt;
  return order_.begin()->first;
}

void SurprisePolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                          const ModelFeedback* feedback, Rng&) {
  require_rows(feedback->probs.size(), batch.size(), "probs");
  const double entropy = mean_entropy(feedback->probs);
  const double surprise = entropy - prev_entropy_;
  for (const Example& x : batch) offer(buffer, x, surprise, surprise);
  prev_entropy_ = entropy;
}

std::optional<double> MinMarginPolicy::max_stored_margin() const {
  auto r = front_rank();
  if (!r) return std::nullopt;
  return -*r;
}

void MinMarginPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                           const ModelFeedback* feedback, Rng&) {
  require_rows(feedback->probs.size(), batch.size(), "probs");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& x = batch[i];
    if (!x.class_id) throw ConfigError("min_margin requires class labels");
    const double m = margin(feedback->probs[i], *x.class_id);
    offer(buffer, x, m, -m);
  }
}

// --- Max Loss ---------------------------------------------------------------

MaxLossPolicy::MaxLossPolicy(std::size_t capacity, std::size_t batch_size)
    : batch_size_(batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (batch_size > capacity) {
    throw ConfigError("max_loss needs memory capacity (" + std::to_string(capacity) +
                      ") of at least one batch (" + std::to_string(batch_size) + ")");
  }
  slots_.resize(capacity / batch_size);
}

std::optional<double> MaxLossPolicy::min_stored_score() const {
  std::optional<double> best;
  for (const auto& slot : slots_) {
    if (!slot.used) return std::nullopt;  // not full yet
    if (!best || slot.score < *best) best = slot.score;
  }
  return best;
}

void MaxLossPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                         const ModelFeedback* feedback, Rng&) {
  if (batch.size() > batch_size_) {
    throw ConfigError("batch of " + std::to_string(batch.size()) +
                      " exceeds the max_loss slot size " + std::to_string(batch_size_));
  }
  const double score = feedback->batch_mean_loss;

  std::size_t target = slots_.size();
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (!slots_[s].used) {
      target = s;
      break;
    }
  }
  if (target == slots_.size()) {
    std::size_t lowest = 0;
    for (std::size_t s = 1; s < slots_.size(); ++s)
      if (slots_[s].score < slots_[lowest].score) lowest = s;
    if (!(score > slots_[lowest].score)) return;
    target = lowest;
    for (EntryHandle h : slots_[target].members) buffer.evict(h);
    slots_[target].members.clear();
  }

  Slot& slot = slots_[target];
  slot.used = true;
  slot.score = score;
  for (const Example& x : batch) {
    MemoryEntry entry = make_entry(x, score);
    entry.batch_slot = static_cast<std::uint32_t>(target);
    auto receipt = buffer.insert(std::move(entry));
    if (!receipt) throw std::logic_error("max_loss slot exceeded memory capacity");
    slot.members.push_back(receipt->handle);
  }
}

// --- Mean of Features -------------------------------------------------------

void MeanOfFeaturesPolicy::recompute_mean(const MemoryBuffer& buffer, KeyState& state) const {
  if (state.mean.size() != dim_) state.mean.assign(dim_, 0.0);
  for (std::uint32_t j : state.support) state.mean[j] = 0.0;
  state.support.clear();
  state.mean_squared_norm = 0.0;
  if (state.members.empty()) return;

  for (EntryHandle h : state.members) {
    const SparseVector& f = *buffer.at(h).features;
    for (std::size_t i = 0; i < f.nnz(); ++i) {
      if (state.mean[f.index[i]] == 0.0) state.support.push_back(f.index[i]);
      state.mean[f.index[i]] += f.value[i];
    }
  }
  // Sums can cancel to exactly zero; dedupe instead of trusting the test above.
  std::sort(state.support.begin(), state.support.end());
  state.support.erase(std::unique(state.support.begin(), state.support.end()),
                      state.support.end());
  const double n = static_cast<double>(state.members.size());
  for (std::uint32_t j : state.support) {
    state.mean[j] /= n;
    state.mean_squared_norm += state.mean[j] * state.mean[j];
  }
}

std::pair<std::size_t, double> MeanOfFeaturesPolicy::farthest_member(const MemoryBuffer& buffer,
                                                                     const KeyState& state) const {
  std::size_t best = 0;
  double best_d2 = -1.0;
  std::uint64_t best_ordinal = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t i = 0; i < state.members.size(); ++i) {
    const MemoryEntry& e = buffer.at(state.members[i]);
    const double d2 = squared_distance(*e.features, state.mean, state.mean_squared_norm);
    if (d2 > best_d2 || (d2 == best_d2 && e.insert_ordinal < best_ordinal)) {
      best = i;
      best_d2 = d2;
      best_ordinal = e.insert_ordinal;
    }
  }
  return {best, std::sqrt(best_d2)};
}

void MeanOfFeaturesPolicy::evict_farthest_from_largest_key(MemoryBuffer& buffer) {
  auto largest = keys_.end();
  for (auto it = keys_.begin(); it != keys_.end(); ++it) {
    if (largest == keys_.end() || it->second.members.size() > largest->second.members.size())
      largest = it;
  }
  if (largest == keys_.end() || largest->second.members.empty()) {
    throw std::logic_error("mof: full memory with no members to evict");
  }
  KeyState& state = largest->second;
  const auto [pos, dist] = farthest_member(buffer, state);
  buffer.evict(state.members[pos]);
  state.members.erase(state.members.begin() + static_cast<std::ptrdiff_t>(pos));
  recompute_mean(buffer, state);
}

void MeanOfFeaturesPolicy::admit(MemoryBuffer& buffer, std::uint32_t key, const Example& example,
                                 const SparseVector& features) {
  KeyState& state = keys_[key];
  MemoryEntry entry = make_entry(example, 0.0);
  entry.features = features;
  if (!state.members.empty()) {
    entry.score = std::sqrt(squared_distance(features, state.mean, state.mean_squared_norm));
  }
  auto receipt = buffer.insert(std::move(entry));
  if (!receipt) throw std::logic_error("mof: insert into full memory");
  state.members.push_back(receipt->handle);
  recompute_mean(buffer, state);
}

void MeanOfFeaturesPolicy::step(MemoryBuffer& buffer, std::span<const Example> batch,
                                const ModelFeedback* feedback, Rng&) {
  require_rows(feedback->features.size(), batch.size(), "features");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Example& x = batch[i];
    const SparseVector& f = feedback->features[i];
    if (dim_ == 0) dim_ = f.dim;
    if (f.dim != dim_) throw std::logic_error("mof: feature dimension mismatch");
    const std::uint32_t key = policy_key(x, mode_);

    if (!buffer.full()) {
      admit(buffer, key, x, f);
      continue;
    }
    auto it = keys_.find(key);
    if (it != keys_.end() && !it->second.members.empty()) {
      KeyState& state = it->second;
      const auto [pos, far] = farthest_member(buffer, state);
      const double d = std::sqrt(squared_distance(f, state.mean, state.mean_squared_norm));
      if (!(d < far)) continue;
      buffer.evict(state.members[pos]);
      state.members.erase(state.members.begin() + static_cast<std::ptrdiff_t>(pos));
      admit(buffer, key, x, f);
    } else {
      evict_farthest_from_largest_key(buffer);
      admit(buffer, key, x, f);
    }
  }
}

// ----------------------------------------------------------------------------

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, std::size_t capacity,
                                    std::size_t batch_size, double capacity_fraction) {
  switch (config.kind) {
    case PolicyKind::NaiveRandom:
      return std::make_unique<NaiveRandomPolicy>(
          config.store_probability.value_or(capacity_fraction));
    case PolicyKind::Reservoir:
      return std::make_unique<ReservoirPolicy>();
    case PolicyKind::RingBuffer:
      return std::make_unique<RingBufferPolicy>(config.key_mode);
    case PolicyKind::Surprise:
      return std::make_unique<SurprisePolicy>();
    case PolicyKind::MinMargin:
      return std::make_unique<MinMarginPolicy>();
    case PolicyKind::MaxLoss:
      return std::make_unique<MaxLossPolicy>(capacity, batch_size);
    case PolicyKind::MeanOfFeatures:
      return std::make_unique<MeanOfFeaturesPolicy>(config.key_mode);
  }
  throw std::logic_error("unhandled policy kind");
}

}  // namespace replaymem
