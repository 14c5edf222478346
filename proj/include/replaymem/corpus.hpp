#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "replaymem/config.hpp"
#include "replaymem/trainer.hpp"

namespace replaymem {

/// Lowercased alphanumeric words, each hashed to a 32-bit token id (FNV-1a).
std::vector<std::uint32_t> tokenize(std::string_view text);

/// Reads a JSONL corpus: one object per line with "text" (string), "label"
/// (integer local class < class_count) and optional "split" ("train"/"test").
/// Lines without "split" are assigned deterministically, roughly
/// `test_fraction` of them to test. Errors name the offending line.
TaskDataset load_corpus(const TaskManifest& manifest, const std::filesystem::path& path,
                        std::uint32_t task_id, double test_fraction);

}  // namespace replaymem
