#include "replaymem/corpus.hpp"

#include <cctype>
#include <fstream>
#include <string>

#include "json.hpp"

namespace replaymem {

namespace {

std::uint32_t fnv1a(std::string_view s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

// Line-level split hash, independent of the token hash.
bool hashed_test_line(std::size_t line_no, double test_fraction) {
  std::uint64_t z = line_no + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53 < test_fraction;
}

}  // namespace

std::vector<std::uint32_t> tokenize(std::string_view text) {
  std::vector<std::uint32_t> out;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.push_back(fnv1a(word));
    word.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      word.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

TaskDataset load_corpus(const TaskManifest& manifest, const std::filesystem::path& path,
                        std::uint32_t task_id, double test_fraction) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path.string() + "' for task " + manifest.name);

  TaskDataset task;
  task.name = manifest.name;
  task.task_id = task_id;
  task.class_count = manifest.class_count;
  task.class_offset = manifest.class_offset;

  const std::string where = path.string() + ":";
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(where + std::to_string(line_no) + ": expected an object");
    if (!j.contains("text") || !j["text"].is_string())
      throw DataError(where + std::to_string(line_no) + ": missing string field \"text\"");
    if (!j.contains("label") || !j["label"].is_number_integer())
      throw DataError(where + std::to_string(line_no) + ": missing integer field \"label\"");
    const auto label = j["label"].get<std::int64_t>();
    if (label < 0 || label >= static_cast<std::int64_t>(manifest.class_count)) {
      throw DataError(where + std::to_string(line_no) + ": label " + std::to_string(label) +
                      " outside [0, " + std::to_string(manifest.class_count) + ")");
    }

    bool is_test;
    if (j.contains("split")) {
      const auto& s = j["split"];
      if (s == "train") {
        is_test = false;
      } else if (s == "test") {
        is_test = true;
      } else {
        throw DataError(where + std::to_string(line_no) + ": split must be \"train\" or \"test\"");
      }
    } else {
      is_test = hashed_test_line(line_no, test_fraction);
    }

    Example x;
    x.task_id = task_id;
    x.class_id = manifest.class_offset + static_cast<std::uint32_t>(label);
    x.text = j["text"].get<std::string>();
    x.tokens = tokenize(x.text);
    (is_test ? task.test : task.train).push_back(std::move(x));
  }
  if (task.train.empty()) throw DataError("corpus '" + path.string() + "' has no training lines");
  return task;
}

}  // namespace replaymem
