#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "support.hpp"

using namespace replaymem;
using testsupport::make_example;

namespace {

HashedBowParams small_params(std::size_t classes, std::uint32_t dim, double lr = 1e-3) {
  HashedBowParams p;
  p.classes = classes;
  p.dim = dim;
  p.learning_rate = lr;
  return p;
}

// Two classes with disjoint token vocabularies.
std::vector<Example> separable_set(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t c = static_cast<std::uint32_t>(i % 2);
    std::vector<std::uint32_t> toks;
    for (int k = 0; k < 6; ++k) toks.push_back(c * 1000 + static_cast<std::uint32_t>(rng() % 50));
    out.push_back(make_example(i, 0, c, toks));
  }
  return out;
}

double accuracy(const Learner& l, std::span<const Example> xs) {
  std::size_t ok = 0;
  const auto probs = l.predict_proba(xs);
  for (std::size_t i = 0; i < xs.size(); ++i) ok += argmax(probs[i]) == *xs[i].class_id;
  return static_cast<double>(ok) / static_cast<double>(xs.size());
}

}  // namespace

TEST_CASE("predict_proba") {
  const auto xs = separable_set(8, 1);
  SUBCASE("zero parameters give uniform rows") {
    HashedBowLearner l(small_params(5, 64));
    for (const auto& row : l.predict_proba(xs))
      for (double p : row) CHECK(p == doctest::Approx(0.2).epsilon(1e-12));
  }
  SUBCASE("rows are distributions for random parameters") {
    HashedBowLearner l(small_params(4, 64));
    Rng rng(3);
    std::normal_distribution<double> n(0.0, 3.0);
    for (double& w : l.weights()) w = n(rng);
    for (double& b : l.bias()) b = n(rng);
    for (const auto& row : l.predict_proba(xs)) {
      double s = 0.0;
      for (double p : row) {
        CHECK(p >= 0.0);
        s += p;
      }
      CHECK(std::abs(s - 1.0) < 1e-6);
    }
  }
  SUBCASE("a single class has probability one") {
    HashedBowLearner l(small_params(1, 16));
    std::vector<Example> one{make_example(0, 0, 0, {1, 2, 3})};
    CHECK(l.predict_proba(one)[0][0] == 1.0);
  }
  CHECK(argmax(std::vector<double>{0.3, 0.3, 0.1}) == 0);
  CHECK(argmax(std::vector<double>{0.1, 0.3, 0.6}) == 2);
}

TEST_CASE("analytic gradient matches central finite differences") {
  HashedBowLearner l(small_params(3, 8));
  Rng rng(11);
  std::normal_distribution<double> n(0.0, 0.5);
  for (double& w : l.weights()) w = n(rng);
  for (double& b : l.bias()) b = n(rng);
  std::vector<Example> batch;
  for (std::uint64_t i = 0; i < 6; ++i) {
    std::vector<std::uint32_t> toks;
    for (int k = 0; k < 5; ++k) toks.push_back(static_cast<std::uint32_t>(rng() % 40));
    batch.push_back(make_example(i, 0, static_cast<std::uint32_t>(i % 3), toks));
  }
  const Gradient g = l.gradient(batch);
  CHECK(g.mean_loss == doctest::Approx(l.loss(batch).mean).epsilon(1e-12));

  const double h = 1e-6;
  auto check = [&](std::span<double> params, const std::vector<double>& analytic) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + h;
      const double up = l.loss(batch).mean;
      params[i] = saved - h;
      const double down = l.loss(batch).mean;
      params[i] = saved;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
      CAPTURE(i);
      CHECK(std::abs(numeric - analytic[i]) / scale < 1e-4);
    }
  };
  check(l.weights(), g.weights);
  check(l.bias(), g.bias);
}

TEST_CASE("training") {
  SUBCASE("repeated batch: loss strictly decreases at lr 1e-3") {
    HashedBowLearner l(small_params(2, 256, 1e-3));
    const auto batch = separable_set(16, 4);
    double prev = l.loss(batch).mean;
    for (int s = 0; s < 10; ++s) {
      l.train_step(batch);
      const double cur = l.loss(batch).mean;
      CHECK(cur < prev);
      prev = cur;
    }
  }
  SUBCASE("200 steps on separable data reach 0.95 training accuracy") {
    HashedBowLearner l(small_params(2, 1024, 1e-3));
    const auto data = separable_set(640, 5);
    for (int s = 0; s < 200; ++s) {
      const std::size_t begin = (s * 32) % data.size();
      l.train_step(std::span<const Example>(data).subspan(begin, 32));
    }
    CHECK(accuracy(l, data) >= 0.95);
  }
  SUBCASE("unlabeled or out-of-range labels are rejected") {
    HashedBowLearner l(small_params(2, 16));
    std::vector<Example> bad{make_example(0, 0, 5, {1})};
    CHECK_THROWS((void)l.loss(bad));
    std::vector<Example> none{make_example(0, 0, std::nullopt, {1})};
    CHECK_THROWS(l.train_step(none));
  }
}

TEST_CASE("features") {
  HashedBowLearner l(small_params(2, 1u << 12));
  std::vector<Example> xs{make_example(0, 0, 0, {5, 9, 5, 77}), make_example(1, 0, 1, {5, 9, 5, 77}),
                          make_example(2, 0, 0, {})};
  const auto f = l.features(xs);
  CHECK(f[0].index == f[1].index);
  CHECK(f[0].value == f[1].value);
  CHECK(std::abs(f[0].squared_norm() - 1.0) < 1e-9);
  CHECK(f[2].nnz() == 0);
  CHECK(f[0].dim == (1u << 12));
  CHECK(std::is_sorted(f[0].index.begin(), f[0].index.end()));

  HashedBowLearner again(small_params(2, 1u << 12));
  CHECK(again.features(xs)[0].index == f[0].index);

  // Token 5 appears twice: its coordinate is twice that of token 9 unless they collide.
  if (f[0].nnz() == 3) {
    std::vector<double> v = f[0].value;
    std::sort(v.begin(), v.end());
    CHECK(v[2] == doctest::Approx(2 * v[0]));
  }
}

TEST_CASE("loss and probability agree") {
  HashedBowLearner l(small_params(4, 128));
  Rng rng(8);
  std::normal_distribution<double> n(0.0, 2.0);
  for (double& w : l.weights()) w = n(rng);
  for (double& b : l.bias()) b = n(rng);
  const auto xs = separable_set(20, 9);
  const auto probs = l.predict_proba(xs);
  const auto loss = l.loss(xs);
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(loss.per_example[i] + std::log(probs[i][*xs[i].class_id])) < 1e-9);
    CHECK(loss.per_example[i] >= 0.0);
    sum += loss.per_example[i];
  }
  CHECK(std::abs(loss.mean - sum / xs.size()) < 1e-9);

  const ModelFeedback fb = make_feedback(l, xs);
  CHECK(fb.probs == probs);
  CHECK(std::abs(fb.batch_mean_loss - loss.mean) < 1e-9);
  CHECK(fb.features.size() == xs.size());
}

TEST_CASE("adapted prediction leaves the learner untouched") {
  HashedBowLearner l(small_params(3, 64, 1e-2));
  const auto xs = separable_set(30, 12);
  for (int s = 0; s < 20; ++s) l.train_step(xs);
  const std::vector<double> w(l.weights().begin(), l.weights().end());
  LocalAdaptationParams p;
  p.steps = 5;
  const auto adapted = l.adapted_proba(std::span<const Example>(xs).first(4), xs[7], p);
  CHECK(std::vector<double>(l.weights().begin(), l.weights().end()) == w);
  double s = 0.0;
  for (double q : adapted) s += q;
  CHECK(std::abs(s - 1.0) < 1e-9);

  p.steps = 0;
  CHECK(l.adapted_proba(std::span<const Example>(xs).first(4), xs[7], p) ==
        l.predict_proba(std::span<const Example>(xs).subspan(7, 1))[0]);
}
