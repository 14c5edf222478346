#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "replaymem/example.hpp"
#include "replaymem/policies.hpp"

namespace replaymem {

/// Local adaptation (MbPA++-style): K neighbors, L proximal steps on mean
/// neighbor cross-entropy + reg * ||theta - theta_base||^2.
struct LocalAdaptationParams {
  std::size_t k = 32;
  std::size_t steps = 10;
  double reg = 1e-3;
  double adapt_lr = 1e-2;

  friend bool operator==(const LocalAdaptationParams&, const LocalAdaptationParams&) = default;
};

struct LossReport {
  std::vector<double> per_example;
  double mean = 0.0;
};

/// Online probabilistic classifier used by the trainer and the policies.
class Learner {
 public:
  virtual ~Learner() = default;

  [[nodiscard]] virtual std::size_t class_count() const = 0;
  [[nodiscard]] virtual std::uint32_t feature_dim() const = 0;

  /// Softmax rows over the global classes.
  [[nodiscard]] virtual std::vector<std::vector<double>> predict_proba(
      std::span<const Example> batch) const = 0;
  /// Cross-entropy -ln p_true; every example must carry a class label.
  [[nodiscard]] virtual LossReport loss(std::span<const Example> batch) const = 0;
  [[nodiscard]] virtual std::vector<SparseVector> features(std::span<const Example> batch) const = 0;
  virtual void train_step(std::span<const Example> batch) = 0;

  /// Prediction for `query` from a parameter copy adapted on `neighbors`.
  /// The learner itself is left unchanged.
  [[nodiscard]] virtual std::vector<double> adapted_proba(std::span<const Example> neighbors,
                                                          const Example& query,
                                                          const LocalAdaptationParams& params) const = 0;
};

/// Probabilities, losses and features of `batch` under the current model.
ModelFeedback make_feedback(const Learner& learner, std::span<const Example> batch);

/// Index of the largest probability; ties resolve to the lowest class id.
std::uint32_t argmax(std::span<const double> row);

struct HashedBowParams {
  std::size_t classes = 2;
  std::uint32_t dim = 1u << 15;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint32_t hash_seed = 0;

  friend bool operator==(const HashedBowParams&, const HashedBowParams&) = default;
};

/// Gradient of the mean cross-entropy with respect to (W, b).
struct Gradient {
  std::vector<double> weights;  // classes x dim, row-major
  std::vector<double> bias;
  double mean_loss = 0.0;
};

/// Multinomial logistic regression over hashed, L2-normalized token counts,
/// trained with Adam. Parameters start at zero.
class HashedBowLearner final : public Learner {
 public:
  explicit HashedBowLearner(const HashedBowParams& params);

  [[nodiscard]] std::size_t class_count() const override { return params_.classes; }
  [[nodiscard]] std::uint32_t feature_dim() const override { return params_.dim; }
  [[nodiscard]] const HashedBowParams& params() const { return params_; }

  [[nodiscard]] std::vector<std::vector<double>> predict_proba(
      std::span<const Example> batch) const override;
  [[nodiscard]] LossReport loss(std::span<const Example> batch) const override;
  [[nodiscard]] std::vector<SparseVector> features(std::span<const Example> batch) const override;
  void train_step(std::span<const Example> batch) override;
  [[nodiscard]] std::vector<double> adapted_proba(std::span<const Example> neighbors,
                                                  const Example& query,
                                                  const LocalAdaptationParams& params) const override;

  [[nodiscard]] SparseVector featurize(const Example& example) const;
  [[nodiscard]] Gradient gradient(std::span<const Example> batch) const;

  /// Raw parameter access, used by gradient checks.
  [[nodiscard]] std::span<double> weights() { return weights_; }
  [[nodiscard]] std::span<double> bias() { return bias_; }
  [[nodiscard]] std::span<const double> weights() const { return weights_; }
  [[nodiscard]] std::span<const double> bias() const { return bias_; }

 private:
  [[nodiscard]] std::vector<double> logits(const SparseVector& x) const;
  [[nodiscard]] std::uint32_t label_of(const Example& example) const;

  HashedBowParams params_;
  std::vector<double> weights_;
  std::vector<double> bias_;
  std::vector<double> m_weights_, v_weights_, m_bias_, v_bias_;
  std::uint64_t steps_ = 0;
};

/// In-place softmax; returns log-sum-exp of the input.
double softmax_inplace(std::vector<double>& z);

}  // namespace replaymem
