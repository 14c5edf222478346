#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "replaymem/example.hpp"
#include "replaymem/learner.hpp"
#include "replaymem/memory_buffer.hpp"
#include "replaymem/policies.hpp"

namespace testsupport {

using namespace replaymem;

inline Example make_example(std::uint64_t stream_id, std::uint32_t task, std::optional<std::uint32_t> cls,
                            std::vector<std::uint32_t> tokens = {}) {
  Example e;
  e.stream_id = stream_id;
  e.task_id = task;
  e.class_id = cls;
  e.tokens = std::move(tokens);
  return e;
}

inline MemoryEntry entry_of(Example e, double score = 0.0) {
  MemoryEntry m;
  m.example = std::move(e);
  m.score = score;
  return m;
}

/// Upper-tail p-value of Pearson's statistic for observed counts against
/// equal expected counts. When each draw picks k of n cells without
/// replacement the cell variance shrinks by (1 - k/n); pass that factor as
/// `variance_factor` so the statistic is again ~ chi-square(n - 1).
inline double chi_square_uniform_p(const std::vector<double>& observed, double variance_factor = 1.0) {
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  const double expected = total / static_cast<double>(observed.size());
  double stat = 0.0;
  for (double o : observed) stat += (o - expected) * (o - expected) / expected;
  stat /= variance_factor;
  boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

/// Feedback with the given probability rows, losses taken as -ln p_true and
/// one-hot features (dimension `dim`, hot index = stream_id % dim).
inline ModelFeedback synthetic_feedback(std::span<const Example> batch,
                                        std::vector<std::vector<double>> probs, std::uint32_t dim) {
  ModelFeedback f;
  f.probs = std::move(probs);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double p = f.probs[i][batch[i].class_id.value_or(0)];
    f.per_example_loss.push_back(-std::log(std::max(p, 1e-300)));
    SparseVector v;
    v.dim = dim;
    v.index = {static_cast<std::uint32_t>(batch[i].stream_id % dim)};
    v.value = {1.0};
    f.features.push_back(std::move(v));
  }
  f.batch_mean_loss = batch.empty() ? 0.0
                                    : std::accumulate(f.per_example_loss.begin(), f.per_example_loss.end(), 0.0) /
                                          static_cast<double>(batch.size());
  return f;
}

}  // namespace testsupport
