#include "replaymem/example.hpp"

#include <algorithm>

namespace replaymem {

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (double v : value) s += v * v;
  return s;
}

double SparseVector::dot(std::span<const double> dense) const {
  double s = 0.0;
  for (std::size_t i = 0; i < index.size(); ++i) s += value[i] * dense[index[i]];
  return s;
}

double squared_distance(const SparseVector& a, const SparseVector& b) {
  if (a.dim != b.dim) throw std::logic_error("feature dimension mismatch");
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.nnz() || j < b.nnz()) {
    if (j == b.nnz() || (i < a.nnz() && a.index[i] < b.index[j])) {
      s += a.value[i] * a.value[i];
      ++i;
    } else if (i == a.nnz() || b.index[j] < a.index[i]) {
      s += b.value[j] * b.value[j];
      ++j;
    } else {
      const double d = a.value[i] - b.value[j];
      s += d * d;
      ++i;
      ++j;
    }
  }
  return s;
}

double squared_distance(const SparseVector& a, std::span<const double> mean,
                        double mean_squared_norm) {
  if (a.dim != mean.size()) throw std::logic_error("feature dimension mismatch");
  return std::max(0.0, a.squared_norm() - 2.0 * a.dot(mean) + mean_squared_norm);
}

}  // namespace replaymem
