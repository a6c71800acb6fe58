#include <doctest.h>

#include <cmath>

#include "cleanse/base_learner.hpp"
#include "cleanse/error.hpp"
#include "cleanse/rng.hpp"

using namespace cleanse;

namespace {

std::vector<Instance> all_majority_patterns(std::size_t bits) {
  std::vector<Instance> out;
  for (std::uint64_t v = 0; v < (1ULL << bits); ++v) {
    auto x = BitVector::from_integer(v, bits);
    out.push_back({x, majority_bit(x), Provenance::clean});
  }
  return out;
}

std::vector<Instance> random_instances(std::size_t m, std::size_t bits, Rng& rng) {
  std::vector<Instance> out;
  for (std::size_t i = 0; i < m; ++i) {
    out.push_back({BitVector::random(bits, rng), static_cast<int>(rng.below(2)), Provenance::clean});
  }
  return out;
}

}  // namespace

TEST_CASE("train on an empty subset yields the zero model") {
  const auto model = train({}, 5, TrainSettings{});
  CHECK(model.weights == std::vector<double>(5, 0.0));
  CHECK(model.bias == 0.0);
}

TEST_CASE("train on a single instance moves towards its label") {
  std::vector<Instance> one{{BitVector{1, 1, 1}, 1, Provenance::clean}};
  TrainSettings s;
  s.l2_strength = 1.0;
  const auto model = train(one, 3, s);
  CHECK(predict_proba(model, BitVector{1, 1, 1}) > 0.5);
}

TEST_CASE("3-bit majority task is fit perfectly") {
  const auto data = all_majority_patterns(3);
  TrainSettings s;
  s.l2_strength = 0.01;
  const auto model = train(data, 3, s);
  int correct = 0;
  for (const auto& inst : data) {
    const int predicted = predict_proba(model, inst.input) > 0.5 ? 1 : 0;
    correct += predicted == inst.label;
  }
  CHECK(correct == 8);
}

TEST_CASE("predict_proba") {
  CHECK(predict_proba(LogisticModel::zero(4), BitVector{1, 0, 1, 1}) == doctest::Approx(0.5).epsilon(1e-15));
  LogisticModel m = LogisticModel::zero(3);
  m.weights[0] = std::log(3.0);
  CHECK(predict_proba(m, BitVector{1, 0, 0}) == doctest::Approx(0.75).epsilon(1e-14));
  m.weights[0] = -std::log(3.0);
  CHECK(predict_proba(m, BitVector{1, 0, 0}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(predict_proba(m, BitVector{1, 0}), Error);
}

TEST_CASE("log_loss") {
  const auto data = all_majority_patterns(5);
  CHECK(log_loss(LogisticModel::zero(5), data) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  LogisticModel confident = LogisticModel::zero(1);
  confident.weights[0] = 80.0;
  confident.bias = -40.0;
  std::vector<Instance> sure{{BitVector{1}, 1, Provenance::clean}, {BitVector{0}, 0, Provenance::clean}};
  CHECK(log_loss(confident, sure) <= 1e-14);
  // Confidently wrong predictions are clamped, keeping the loss finite.
  std::vector<Instance> wrong{{BitVector{1}, 0, Provenance::clean}};
  CHECK(log_loss(confident, wrong) == -std::log1p(-(1.0 - kProbabilityClamp)));

  LogisticModel three_quarters = LogisticModel::zero(3);
  three_quarters.weights[0] = std::log(3.0);
  std::vector<Instance> single{{BitVector{1, 0, 0}, 1, Provenance::clean}};
  CHECK(log_loss(three_quarters, single) == doctest::Approx(0.2876820724517809).epsilon(1e-12));

  CHECK_THROWS_AS(log_loss(three_quarters, {}), Error);
}

TEST_CASE("analytic gradient matches central finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t bits = 3 + rng.below(6);
    const auto data = random_instances(5 + rng.below(20), bits, rng);
    LogisticModel m = LogisticModel::zero(bits, 0.1 + rng.uniform());
    for (auto& w : m.weights) w = 2.0 * rng.uniform() - 1.0;
    m.bias = 2.0 * rng.uniform() - 1.0;

    std::vector<double> grad;
    training_objective(m, data, &grad);
    const double h = 1e-6;
    for (std::size_t k = 0; k <= bits; ++k) {
      LogisticModel up = m, down = m;
      double& pu = k < bits ? up.weights[k] : up.bias;
      double& pd = k < bits ? down.weights[k] : down.bias;
      pu += h;
      pd -= h;
      const double fd = (training_objective(up, data) - training_objective(down, data)) / (2 * h);
      const double rel = std::abs(fd - grad[k]) / std::max(1e-8, std::max(std::abs(fd), std::abs(grad[k])));
      CHECK(rel <= 1e-5);
    }
  }
}

TEST_CASE("training is deterministic and monotone") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = random_instances(30, 7, rng);
    TrainSettings s;
    s.l2_strength = trial % 2 ? 1.0 : 0.01;
    const auto a = train_with_report(data, 7, s);
    const auto b = train_with_report(data, 7, s);
    CHECK(a.model.weights == b.model.weights);
    CHECK(a.model.bias == b.model.bias);
    CHECK(a.converged);
    for (std::size_t i = 1; i < a.objective_history.size(); ++i) {
      CHECK(a.objective_history[i] <= a.objective_history[i - 1]);
    }
  }
}

TEST_CASE("empty subset scores exactly ln 2 on a balanced split") {
  const auto data = all_majority_patterns(5);
  const auto model = train({}, 5, TrainSettings{});
  CHECK(std::abs(log_loss(model, data) - std::log(2.0)) <= 1e-12);
}

TEST_CASE("invalid settings are rejected") {
  TrainSettings s;
  s.convergence_tolerance = 0.0;
  CHECK_THROWS_AS(train({}, 3, s), ConfigError);
  s = TrainSettings{};
  s.max_iterations = 0;
  CHECK_THROWS_AS(train({}, 3, s), ConfigError);
  s = TrainSettings{};
  s.l2_strength = -1.0;
  CHECK_THROWS_AS(train({}, 3, s), ConfigError);
}

TEST_CASE("parameter dump") {
  LogisticModel m = LogisticModel::zero(2);
  m.weights = {0.5, -1.25};
  m.bias = 2.0;
  CHECK(model_to_csv(m) == "parameter,value\nw0,0.5\nw1,-1.25\nbias,2\n");
}
