#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "replaymem/config.hpp"

namespace replaymem {

/// Generator parameters for a class-conditional bag-of-words stream.
///
/// Token ids [0, noise_vocab) form the shared noise block; the remaining
/// vocabulary is split into equal disjoint blocks, one per global class plus
/// one per local label (the topic blocks).
/// Each token of an example of class c is a class-signal token with
/// probability alpha_t and a noise token otherwise. A class-signal token comes
/// from a topic block shared by every task's class with the same local label
/// with probability `overlap`, and from c's own block otherwise; overlapping
/// topics with different global labels make later tasks interfere with
/// earlier ones.
///
/// With `drift` on, generation task t (0-based) uses
///   alpha_t = alpha * (1 - drift_strength * t / (tasks - 1))
/// so later tasks carry a weaker class signal, and its noise tokens come from
/// a window of the noise block that slides by noise_vocab / (2 * tasks) per
/// task.
struct SyntheticSpec {
  std::uint32_t vocab_size = 4000;
  std::uint32_t noise_vocab = 1000;
  std::uint32_t tasks = 5;
  std::uint32_t classes_per_task = 4;
  std::uint32_t train_per_task = 4000;
  std::uint32_t test_per_task = 500;
  std::uint32_t tokens_per_example = 20;
  double alpha = 0.5;
  double overlap = 0.0;
  bool drift = true;
  double drift_strength = 0.5;
  std::uint64_t seed = 7;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

SyntheticSpec parse_synthetic_spec(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticSpec& spec);

struct SyntheticLine {
  std::string text;
  std::uint32_t label = 0;  // local
  bool test = false;
};

struct SyntheticTask {
  TaskManifest manifest;
  std::vector<SyntheticLine> lines;
};

/// Deterministic in the spec. Throws ConfigError when the vocabulary cannot
/// hold the noise block plus one token per class block.
std::vector<SyntheticTask> generate_synthetic(const SyntheticSpec& spec);

/// Four named orders; for five tasks they mirror the text-classification
/// orders (i)-(iv) with tasks t0..t4 standing in for Yelp, AGNews, DBPedia,
/// Amazon and Yahoo.
std::map<std::string, std::vector<std::string>> default_orders(std::uint32_t tasks);

/// Writes <out>/<task>.jsonl, <out>/manifest.json and a ready-to-run
/// <out>/config.json. Returns the manifest.
Manifest write_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

}  // namespace replaymem
