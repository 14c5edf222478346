#include "replaymem/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

namespace replaymem {

namespace {

// murmur3 finalizer; stable across platforms, unlike std::hash.
std::uint32_t mix32(std::uint32_t h) {
  h ^= h >> 16;
  h *= 0x85ebca6bu;
  h ^= h >> 13;
  h *= 0xc2b2ae35u;
  h ^= h >> 16;
  return h;
}

}  // namespace

double softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return mx + std::log(sum);
}

std::uint32_t argmax(std::span<const double> row) {
  return static_cast<std::uint32_t>(std::max_element(row.begin(), row.end()) - row.begin());
}

ModelFeedback make_feedback(const Learner& learner, std::span<const Example> batch) {
  ModelFeedback fb;
  fb.probs = learner.predict_proba(batch);
  bool labeled = std::all_of(batch.begin(), batch.end(),
                             [](const Example& x) { return x.class_id.has_value(); });
  if (labeled) {
    LossReport l = learner.loss(batch);
    fb.per_example_loss = std::move(l.per_example);
    fb.batch_mean_loss = l.mean;
  }
  fb.features = learner.features(batch);
  return fb;
}

HashedBowLearner::HashedBowLearner(const HashedBowParams& params) : params_(params) {
  if (params_.classes == 0) throw ConfigError("learner needs at least one class");
  if (params_.dim == 0) throw ConfigError("learner feature dimension must be positive");
  if (!(params_.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  const std::size_t n = params_.classes * params_.dim;
  weights_.assign(n, 0.0);
  m_weights_.assign(n, 0.0);
  v_weights_.assign(n, 0.0);
  bias_.assign(params_.classes, 0.0);
  m_bias_.assign(params_.classes, 0.0);
  v_bias_.assign(params_.classes, 0.0);
}

SparseVector HashedBowLearner::featurize(const Example& example) const {
  SparseVector f;
  f.dim = params_.dim;
  if (example.tokens.empty()) return f;
  std::vector<std::uint32_t> idx;
  idx.reserve(example.tokens.size());
  for (std::uint32_t t : example.tokens) idx.push_back(mix32(t ^ mix32(params_.hash_seed + 0x9e3779b9u)) % params_.dim);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    f.index.push_back(idx[i]);
    f.value.push_back(static_cast<double>(j - i));
    i = j;
  }
  const double norm = std::sqrt(f.squared_norm());
  for (double& v : f.value) v /= norm;
  return f;
}

std::vector<SparseVector> HashedBowLearner::features(std::span<const Example> batch) const {
  std::vector<SparseVector> out;
  out.reserve(batch.size());
  for (const Example& x : batch) out.push_back(featurize(x));
  return out;
}

std::vector<double> HashedBowLearner::logits(const SparseVector& x) const {
  std::vector<double> z(bias_);
  for (std::size_t c = 0; c < params_.classes; ++c) {
    z[c] += x.dot(std::span<const double>(weights_).subspan(c * params_.dim, params_.dim));
  }
  return z;
}

std::uint32_t HashedBowLearner::label_of(const Example& example) const {
  if (!example.class_id) {
    throw std::invalid_argument("example " + std::to_string(example.stream_id) +
                                " has no class label");
  }
  if (*example.class_id >= params_.classes) {
    throw std::out_of_range("class id " + std::to_string(*example.class_id) +
                            " outside the learner's label space");
  }
  return *example.class_id;
}

std::vector<std::vector<double>> HashedBowLearner::predict_proba(
    std::span<const Example> batch) const {
  std::vector<std::vector<double>> out;
  out.reserve(batch.size());
  for (const Example& x : batch) {
    auto z = logits(featurize(x));
    softmax_inplace(z);
    out.push_back(std::move(z));
  }
  return out;
}

LossReport HashedBowLearner::loss(std::span<const Example> batch) const {
  LossReport r;
  r.per_example.reserve(batch.size());
  for (const Example& x : batch) {
    const std::uint32_t y = label_of(x);
    auto z = logits(featurize(x));
    const double zy = z[y];
    const double lse = softmax_inplace(z);
    r.per_example.push_back(std::max(0.0, lse - zy));
  }
  if (!batch.empty()) {
    r.mean = std::accumulate(r.per_example.begin(), r.per_example.end(), 0.0) /
             static_cast<double>(batch.size());
  }
  return r;
}

Gradient HashedBowLearner::gradient(std::span<const Example> batch) const {
  Gradient g;
  g.weights.assign(weights_.size(), 0.0);
  g.bias.assign(params_.classes, 0.0);
  if (batch.empty()) return g;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const Example& x : batch) {
    const std::uint32_t y = label_of(x);
    const SparseVector f = featurize(x);
    auto z = logits(f);
    const double zy = z[y];
    g.mean_loss += (softmax_inplace(z) - zy) * inv_n;
    z[y] -= 1.0;  // dL/dz = p - onehot(y)
    for (std::size_t c = 0; c < params_.classes; ++c) {
      const double dz = z[c] * inv_n;
      g.bias[c] += dz;
      double* row = g.weights.data() + c * params_.dim;
      for (std::size_t i = 0; i < f.nnz(); ++i) row[f.index[i]] += dz * f.value[i];
    }
  }
  return g;
}

void HashedBowLearner::train_step(std::span<const Example> batch) {
  if (batch.empty()) return;
  const Gradient g = gradient(batch);
  ++steps_;
  const double b1 = params_.beta1, b2 = params_.beta2;
  const double step_size = params_.learning_rate * std::sqrt(1.0 - std::pow(b2, steps_)) /
                           (1.0 - std::pow(b1, steps_));
  auto adam = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                  const std::vector<double>& grad) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
      v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
      p[i] -= step_size * m[i] / (std::sqrt(v[i]) + params_.epsilon);
    }
  };
  adam(weights_, m_weights_, v_weights_, g.weights);
  adam(bias_, m_bias_, v_bias_, g.bias);
}

std::vector<double> HashedBowLearner::adapted_proba(std::span<const Example> neighbors,
                                                    const Example& query,
                                                    const LocalAdaptationParams& params) const {
  const SparseVector q = featurize(query);
  std::vector<double> base = logits(q);
  if (neighbors.empty() || params.steps == 0) {
    softmax_inplace(base);
    return base;
  }

  // Only columns touched by the neighbors (plus the bias) move away from the
  // base parameters, so the adapted copy is stored as a delta over them.
  std::vector<SparseVector> feats = features(neighbors);
  std::unordered_map<std::uint32_t, std::size_t> column;
  std::vector<std::uint32_t> columns;
  for (const auto& f : feats)
    for (std::uint32_t j : f.index)
      if (column.emplace(j, columns.size()).second) columns.push_back(j);

  const std::size_t C = params_.classes;
  std::vector<double> delta_w(columns.size() * C, 0.0);  // column-major by touched column
  std::vector<double> delta_b(C, 0.0);
  std::vector<double> grad_w(delta_w.size());
  std::vector<double> grad_b(C);
  const double shrink = 1.0 / (1.0 + 2.0 * params.adapt_lr * params.reg);
  const double inv_n = 1.0 / static_cast<double>(neighbors.size());

  for (std::size_t step = 0; step < params.steps; ++step) {
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);
    for (std::size_t n = 0; n < neighbors.size(); ++n) {
      const SparseVector& f = feats[n];
      const std::uint32_t y = label_of(neighbors[n]);
      std::vector<double> z = logits(f);
      for (std::size_t c = 0; c < C; ++c) z[c] += delta_b[c];
      for (std::size_t i = 0; i < f.nnz(); ++i) {
        const double* d = &delta_w[column.at(f.index[i]) * C];
        for (std::size_t c = 0; c < C; ++c) z[c] += d[c] * f.value[i];
      }
      softmax_inplace(z);
      z[y] -= 1.0;
      for (std::size_t c = 0; c < C; ++c) grad_b[c] += z[c] * inv_n;
      for (std::size_t i = 0; i < f.nnz(); ++i) {
        double* g = &grad_w[column.at(f.index[i]) * C];
        for (std::size_t c = 0; c < C; ++c) g[c] += z[c] * f.value[i] * inv_n;
      }
    }
    // Proximal step on the quadratic anchor: stable for any reg.
    for (std::size_t i = 0; i < delta_w.size(); ++i)
      delta_w[i] = (delta_w[i] - params.adapt_lr * grad_w[i]) * shrink;
    for (std::size_t c = 0; c < C; ++c)
      delta_b[c] = (delta_b[c] - params.adapt_lr * grad_b[c]) * shrink;
  }

  for (std::size_t c = 0; c < C; ++c) base[c] += delta_b[c];
  for (std::size_t i = 0; i < q.nnz(); ++i) {
    auto it = column.find(q.index[i]);
    if (it == column.end()) continue;
    const double* d = &delta_w[it->second * C];
    for (std::size_t c = 0; c < C; ++c) base[c] += d[c] * q.value[i];
  }
  softmax_inplace(base);
  return base;
}

}  // namespace replaymem
