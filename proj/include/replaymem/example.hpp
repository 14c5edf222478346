#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace replaymem {

/// Raised for invalid user-supplied configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for unreadable or corrupt input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One labeled item of the training stream.
struct Example {
  std::uint64_t stream_id = 0;
  std::uint32_t task_id = 0;
  std::optional<std::uint32_t> class_id;  // absent for class-free tasks
  std::vector<std::uint32_t> tokens;
  std::string text;
};

/// Sparse real vector with sorted, unique indices.
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  [[nodiscard]] std::size_t nnz() const { return index.size(); }
  [[nodiscard]] double squared_norm() const;
  [[nodiscard]] double dot(std::span<const double> dense) const;
};

/// ||a - b||^2 for two sparse vectors of the same dimension.
double squared_distance(const SparseVector& a, const SparseVector& b);

/// ||a - mean||^2 where `mean_squared_norm` is ||mean||^2.
double squared_distance(const SparseVector& a, std::span<const double> mean,
                        double mean_squared_norm);

}  // namespace replaymem
