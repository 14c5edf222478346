#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "replaymem/trainer.hpp"

namespace replaymem {

/// One corpus file of the stream. Local labels map to global ids through
/// `class_offset`; tasks sharing a `shared_label_group` may share a range.
struct TaskManifest {
  std::string name;
  std::string path;
  std::uint32_t class_count = 1;
  std::uint32_t class_offset = 0;
  std::optional<std::string> shared_label_group;

  friend bool operator==(const TaskManifest&, const TaskManifest&) = default;
};

struct Manifest {
  std::vector<TaskManifest> tasks;
  std::map<std::string, std::vector<std::string>> orders;  // named presets

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

/// Contents of an experiment config file.
struct RunConfig {
  std::string manifest;  // relative to the config file's directory
  std::string order = "i";
  std::vector<std::string> task_order;  // overrides `order` when non-empty
  double test_fraction = 0.1;           // used only for lines without "split"
  ExperimentConfig experiment;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

Manifest parse_manifest(const nlohmann::json& j);
nlohmann::json to_json(const Manifest& manifest);
Manifest load_manifest(const std::filesystem::path& path);

/// Checks that global label ranges are disjoint except within a shared group.
void validate_manifest(const Manifest& manifest);

/// A config resolved against its manifest and loaded into memory.
struct LoadedExperiment {
  ExperimentConfig config;         // task_order and order_name filled in
  std::vector<TaskDataset> tasks;  // stream order
};

LoadedExperiment load_experiment(const std::filesystem::path& config_path);
LoadedExperiment load_experiment(const RunConfig& config, const std::filesystem::path& base_dir);

/// Configuration with every default spelled out.
RunConfig default_run_config();

}  // namespace replaymem
