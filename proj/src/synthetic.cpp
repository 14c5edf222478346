#include "replaymem/synthetic.hpp"

#include <fstream>
#include <random>

namespace replaymem {

using nlohmann::json;

SyntheticSpec parse_synthetic_spec(const json& j) {
  if (!j.is_object()) throw ConfigError("synthetic spec must be a JSON object");
  SyntheticSpec s;
  static const char* known[] = {"vocab_size", "noise_vocab", "tasks", "classes_per_task",
                                "train_per_task", "test_per_task", "tokens_per_example",
                                "alpha", "overlap", "drift", "drift_strength", "seed"};
  for (const auto& [key, v] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw ConfigError("unknown field '" + key + "' in synthetic spec");
  }
  try {
    s.vocab_size = j.value("vocab_size", s.vocab_size);
    s.noise_vocab = j.value("noise_vocab", s.noise_vocab);
    s.tasks = j.value("tasks", s.tasks);
    s.classes_per_task = j.value("classes_per_task", s.classes_per_task);
    s.train_per_task = j.value("train_per_task", s.train_per_task);
    s.test_per_task = j.value("test_per_task", s.test_per_task);
    s.tokens_per_example = j.value("tokens_per_example", s.tokens_per_example);
    s.alpha = j.value("alpha", s.alpha);
    s.overlap = j.value("overlap", s.overlap);
    s.drift = j.value("drift", s.drift);
    s.drift_strength = j.value("drift_strength", s.drift_strength);
    s.seed = j.value("seed", s.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

json to_json(const SyntheticSpec& s) {
  return {{"vocab_size", s.vocab_size},       {"noise_vocab", s.noise_vocab},
          {"tasks", s.tasks},                 {"classes_per_task", s.classes_per_task},
          {"train_per_task", s.train_per_task}, {"test_per_task", s.test_per_task},
          {"tokens_per_example", s.tokens_per_example}, {"alpha", s.alpha}, {"overlap", s.overlap},
          {"drift", s.drift},                 {"drift_strength", s.drift_strength},
          {"seed", s.seed}};
}

std::vector<SyntheticTask> generate_synthetic(const SyntheticSpec& spec) {
  if (spec.tasks == 0 || spec.classes_per_task == 0)
    throw ConfigError("synthetic spec needs at least one task and one class");
  if (!(spec.alpha >= 0.0 && spec.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(spec.drift_strength >= 0.0 && spec.drift_strength <= 1.0))
    throw ConfigError("drift_strength must lie in [0, 1]");
  if (!(spec.overlap >= 0.0 && spec.overlap <= 1.0)) throw ConfigError("overlap must lie in [0, 1]");
  if (spec.tokens_per_example == 0) throw ConfigError("tokens_per_example must be positive");
  const std::uint64_t classes =
      std::uint64_t{spec.tasks} * spec.classes_per_task + spec.classes_per_task;
  if (spec.noise_vocab == 0 || spec.vocab_size <= spec.noise_vocab ||
      (spec.vocab_size - spec.noise_vocab) / classes == 0) {
    throw ConfigError("vocab_size " + std::to_string(spec.vocab_size) +
                      " cannot hold a noise block of " + std::to_string(spec.noise_vocab) +
                      " plus " + std::to_string(classes) + " class and topic blocks");
  }
  const std::uint32_t block = static_cast<std::uint32_t>((spec.vocab_size - spec.noise_vocab) / classes);
  const std::uint32_t window = spec.drift ? std::max<std::uint32_t>(1, spec.noise_vocab / 2) : spec.noise_vocab;
  const std::uint32_t slide =
      spec.drift ? std::max<std::uint32_t>(1, spec.noise_vocab / (2 * spec.tasks)) : 0;

  std::mt19937_64 rng(spec.seed);
  std::vector<SyntheticTask> out;
  for (std::uint32_t t = 0; t < spec.tasks; ++t) {
    SyntheticTask task;
    task.manifest.name = "t" + std::to_string(t);
    task.manifest.path = task.manifest.name + ".jsonl";
    task.manifest.class_count = spec.classes_per_task;
    task.manifest.class_offset = t * spec.classes_per_task;

    double alpha = spec.alpha;
    if (spec.drift && spec.tasks > 1)
      alpha *= 1.0 - spec.drift_strength * static_cast<double>(t) / (spec.tasks - 1);
    const std::uint32_t noise_begin = (t * slide) % (spec.noise_vocab - window + 1);

    std::bernoulli_distribution from_class(alpha);
    std::bernoulli_distribution from_topic(spec.overlap);
    std::uniform_int_distribution<std::uint32_t> label_dist(0, spec.classes_per_task - 1);
    std::uniform_int_distribution<std::uint32_t> in_block(0, block - 1);
    std::uniform_int_distribution<std::uint32_t> in_noise(0, window - 1);

    const std::uint32_t total = spec.train_per_task + spec.test_per_task;
    for (std::uint32_t i = 0; i < total; ++i) {
      SyntheticLine line;
      line.label = label_dist(rng);
      line.test = i >= spec.train_per_task;
      const std::uint32_t global = task.manifest.class_offset + line.label;
      const std::uint32_t topic = spec.tasks * spec.classes_per_task + line.label;
      for (std::uint32_t k = 0; k < spec.tokens_per_example; ++k) {
        std::uint32_t token;
        if (from_class(rng)) {
          const std::uint32_t b = from_topic(rng) ? topic : global;
          token = spec.noise_vocab + b * block + in_block(rng);
        } else {
          token = noise_begin + in_noise(rng);
        }
        if (k) line.text.push_back(' ');
        line.text += "w" + std::to_string(token);
      }
      task.lines.push_back(std::move(line));
    }
    out.push_back(std::move(task));
  }
  return out;
}

std::map<std::string, std::vector<std::string>> default_orders(std::uint32_t tasks) {
  auto name = [](std::uint32_t i) { return "t" + std::to_string(i); };
  std::map<std::string, std::vector<std::string>> orders;
  if (tasks == 5) {
    const std::uint32_t presets[4][5] = {{0, 1, 2, 3, 4}, {2, 4, 1, 3, 0}, {0, 4, 3, 2, 1}, {1, 0, 3, 4, 2}};
    const char* labels[4] = {"i", "ii", "iii", "iv"};
    for (int o = 0; o < 4; ++o) {
      for (std::uint32_t k = 0; k < 5; ++k) orders[labels[o]].push_back(name(presets[o][k]));
    }
    return orders;
  }
  // Identity, reverse, evens-then-odds, and a rotation by one.
  std::vector<std::string> id, rev, evens, rot;
  for (std::uint32_t i = 0; i < tasks; ++i) {
    id.push_back(name(i));
    rev.push_back(name(tasks - 1 - i));
    rot.push_back(name((i + 1) % tasks));
  }
  for (std::uint32_t i = 0; i < tasks; i += 2) evens.push_back(name(i));
  for (std::uint32_t i = 1; i < tasks; i += 2) evens.push_back(name(i));
  orders["i"] = id;
  orders["ii"] = rev;
  orders["iii"] = evens;
  orders["iv"] = rot;
  return orders;
}

Manifest write_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir) {
  const auto tasks = generate_synthetic(spec);
  std::filesystem::create_directories(out_dir);
  Manifest manifest;
  for (const auto& task : tasks) {
    std::ofstream out(out_dir / task.manifest.path, std::ios::binary);
    if (!out) throw DataError("cannot write " + (out_dir / task.manifest.path).string());
    for (const auto& line : task.lines) {
      json j = {{"text", line.text}, {"label", line.label}, {"split", line.test ? "test" : "train"}};
      out << j.dump() << '\n';
    }
    manifest.tasks.push_back(task.manifest);
  }
  manifest.orders = default_orders(spec.tasks);

  std::ofstream(out_dir / "manifest.json", std::ios::binary) << to_json(manifest).dump(2) << '\n';
  RunConfig config = default_run_config();
  std::ofstream(out_dir / "config.json", std::ios::binary) << to_json(config).dump(2) << '\n';
  std::ofstream(out_dir / "synthetic.json", std::ios::binary) << to_json(spec).dump(2) << '\n';
  return manifest;
}

}  // namespace replaymem
