#include "replaymem/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "replaymem/corpus.hpp"

namespace replaymem {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("unknown field '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  c.manifest = "manifest.json";
  return c;
}

namespace {

RunConfig parse_run_config_fields(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"manifest", "order", "task_order", "test_fraction", "capacity_fraction",
                  "replay_every", "batch_size", "policy", "key_mode", "store_probability", "seed",
                  "learner", "local_adaptation"},
                 "config");
  RunConfig c = default_run_config();
  ExperimentConfig& e = c.experiment;
  read(j, "manifest", c.manifest);
  read(j, "order", c.order);
  read(j, "task_order", c.task_order);
  read(j, "test_fraction", c.test_fraction);
  read(j, "capacity_fraction", e.capacity_fraction);
  read(j, "replay_every", e.replay_every);
  read(j, "batch_size", e.batch_size);
  read(j, "seed", e.seed);
  if (j.contains("policy")) e.policy.kind = parse_policy_kind(j.at("policy").get<std::string>());
  if (j.contains("key_mode")) e.policy.key_mode = parse_key_mode(j.at("key_mode").get<std::string>());
  if (j.contains("store_probability") && !j.at("store_probability").is_null())
    e.policy.store_probability = j.at("store_probability").get<double>();

  if (j.contains("learner")) {
    const json& l = j.at("learner");
    reject_unknown(l, {"dim", "learning_rate", "beta1", "beta2", "epsilon", "hash_seed"}, "learner");
    read(l, "dim", e.learner.dim);
    read(l, "learning_rate", e.learner.learning_rate);
    read(l, "beta1", e.learner.beta1);
    read(l, "beta2", e.learner.beta2);
    read(l, "epsilon", e.learner.epsilon);
    read(l, "hash_seed", e.learner.hash_seed);
  }
  if (j.contains("local_adaptation") && !j.at("local_adaptation").is_null()) {
    const json& a = j.at("local_adaptation");
    reject_unknown(a, {"k", "steps", "reg", "adapt_lr"}, "local_adaptation");
    LocalAdaptationParams p;
    read(a, "k", p.k);
    read(a, "steps", p.steps);
    read(a, "reg", p.reg);
    read(a, "adapt_lr", p.adapt_lr);
    if (p.reg < 0.0) throw ConfigError("local_adaptation.reg must be >= 0");
    if (!(p.adapt_lr > 0.0)) throw ConfigError("local_adaptation.adapt_lr must be > 0");
    e.local_adaptation = p;
  }

  if (!(e.capacity_fraction > 0.0 && e.capacity_fraction <= 1.0))
    throw ConfigError("capacity_fraction must lie in (0, 1]");
  if (e.batch_size == 0) throw ConfigError("batch_size must be positive");
  if (e.replay_every == 0) throw ConfigError("replay_every must be positive");
  if (!(c.test_fraction >= 0.0 && c.test_fraction < 1.0))
    throw ConfigError("test_fraction must lie in [0, 1)");
  if (e.learner.dim == 0) throw ConfigError("learner.dim must be positive");
  return c;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  try {
    return parse_run_config_fields(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json to_json(const RunConfig& c) {
  const ExperimentConfig& e = c.experiment;
  json j;
  j["manifest"] = c.manifest;
  j["order"] = c.order;
  j["task_order"] = c.task_order;
  j["test_fraction"] = c.test_fraction;
  j["capacity_fraction"] = e.capacity_fraction;
  j["replay_every"] = e.replay_every;
  j["batch_size"] = e.batch_size;
  j["policy"] = std::string(to_string(e.policy.kind));
  j["key_mode"] = std::string(to_string(e.policy.key_mode));
  j["store_probability"] =
      e.policy.store_probability ? json(*e.policy.store_probability) : json(nullptr);
  j["seed"] = e.seed;
  j["learner"] = {{"dim", e.learner.dim},
                  {"learning_rate", e.learner.learning_rate},
                  {"beta1", e.learner.beta1},
                  {"beta2", e.learner.beta2},
                  {"epsilon", e.learner.epsilon},
                  {"hash_seed", e.learner.hash_seed}};
  if (e.local_adaptation) {
    const auto& a = *e.local_adaptation;
    j["local_adaptation"] = {{"k", a.k}, {"steps", a.steps}, {"reg", a.reg}, {"adapt_lr", a.adapt_lr}};
  } else {
    j["local_adaptation"] = nullptr;
  }
  return j;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_json_file(path));
}

namespace {

Manifest parse_manifest_fields(const json& j) {
  if (!j.is_object()) throw ConfigError("manifest must be a JSON object");
  reject_unknown(j, {"tasks", "orders"}, "manifest");
  Manifest m;
  if (!j.contains("tasks") || !j.at("tasks").is_array()) throw ConfigError("manifest needs a \"tasks\" array");
  for (const json& t : j.at("tasks")) {
    reject_unknown(t, {"name", "path", "class_count", "class_offset", "shared_label_group"},
                   "manifest task");
    TaskManifest tm;
    read(t, "name", tm.name);
    read(t, "path", tm.path);
    read(t, "class_count", tm.class_count);
    read(t, "class_offset", tm.class_offset);
    if (t.contains("shared_label_group") && !t.at("shared_label_group").is_null())
      tm.shared_label_group = t.at("shared_label_group").get<std::string>();
    if (tm.name.empty() || tm.path.empty()) throw ConfigError("manifest task needs name and path");
    if (tm.class_count == 0) throw ConfigError("task '" + tm.name + "' has zero classes");
    m.tasks.push_back(std::move(tm));
  }
  read(j, "orders", m.orders);
  validate_manifest(m);
  return m;
}

}  // namespace

Manifest parse_manifest(const json& j) {
  try {
    return parse_manifest_fields(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

json to_json(const Manifest& m) {
  json tasks = json::array();
  for (const auto& t : m.tasks) {
    tasks.push_back({{"name", t.name},
                     {"path", t.path},
                     {"class_count", t.class_count},
                     {"class_offset", t.class_offset},
                     {"shared_label_group",
                      t.shared_label_group ? json(*t.shared_label_group) : json(nullptr)}});
  }
  return {{"tasks", tasks}, {"orders", m.orders}};
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_json_file(path));
}

void validate_manifest(const Manifest& m) {
  // Names end up as bare CSV fields.
  auto check_name = [](const std::string& name, const char* what) {
    if (name.find_first_of(",\"\r\n") != std::string::npos)
      throw ConfigError(std::string(what) + " name '" + name + "' contains a comma, quote or newline");
  };
  std::set<std::string> names;
  for (const auto& t : m.tasks) {
    check_name(t.name, "task");
    if (!names.insert(t.name).second) throw ConfigError("duplicate task name '" + t.name + "'");
  }
  for (const auto& [order, seq] : m.orders) check_name(order, "order");
  for (std::size_t a = 0; a < m.tasks.size(); ++a) {
    for (std::size_t b = a + 1; b < m.tasks.size(); ++b) {
      const auto& x = m.tasks[a];
      const auto& y = m.tasks[b];
      const bool overlap = x.class_offset < y.class_offset + y.class_count &&
                           y.class_offset < x.class_offset + x.class_count;
      const bool shared = x.shared_label_group && x.shared_label_group == y.shared_label_group;
      if (overlap && !shared) {
        throw ConfigError("tasks '" + x.name + "' and '" + y.name +
                          "' overlap in label space without a shared_label_group");
      }
    }
  }
  for (const auto& [order, seq] : m.orders) {
    for (const auto& name : seq)
      if (!names.count(name)) throw ConfigError("order '" + order + "' names unknown task '" + name + "'");
  }
}

LoadedExperiment load_experiment(const RunConfig& config, const std::filesystem::path& base_dir) {
  const std::filesystem::path manifest_path = base_dir / config.manifest;
  const Manifest manifest = load_manifest(manifest_path);
  const std::filesystem::path data_dir = manifest_path.parent_path();

  LoadedExperiment out;
  out.config = config.experiment;
  if (!config.task_order.empty()) {
    out.config.task_order = config.task_order;
    out.config.order_name = config.order.empty() ? "custom" : config.order;
  } else {
    auto it = manifest.orders.find(config.order);
    if (it == manifest.orders.end())
      throw ConfigError("order '" + config.order + "' not defined in the manifest");
    out.config.task_order = it->second;
    out.config.order_name = config.order;
  }

  std::set<std::string> seen;
  for (const auto& name : out.config.task_order) {
    if (!seen.insert(name).second) throw ConfigError("task '" + name + "' repeats in the order");
    auto it = std::find_if(manifest.tasks.begin(), manifest.tasks.end(),
                           [&](const TaskManifest& t) { return t.name == name; });
    if (it == manifest.tasks.end()) throw ConfigError("order names unknown task '" + name + "'");
    const auto task_id = static_cast<std::uint32_t>(it - manifest.tasks.begin());
    out.tasks.push_back(load_corpus(*it, data_dir / it->path, task_id, config.test_fraction));
  }
  return out;
}

LoadedExperiment load_experiment(const std::filesystem::path& config_path) {
  return load_experiment(load_run_config(config_path), config_path.parent_path());
}

}  // namespace replaymem
