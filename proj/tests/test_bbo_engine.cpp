#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cleanse/bbo_engine.hpp"
#include "cleanse/error.hpp"
#include "cleanse/surrogate.hpp"

using namespace cleanse;

namespace {

SampleBatch make_batch(std::vector<BitVector> samples, std::vector<double> energies) {
  SampleBatch b;
  b.samples = std::move(samples);
  b.energies = std::move(energies);
  return b;
}

EngineConfig small_config(SamplerKind kind, std::size_t n_init, std::size_t n_total, std::size_t reads) {
  EngineConfig c;
  c.n_init = n_init;
  c.n_total = n_total;
  c.sampler.kind = kind;
  c.sampler.num_reads = reads;
  c.sampler.num_sweeps = 200;
  c.record_timing = false;
  return c;
}

void check_trace_invariants(const RunTrace& t, const EngineConfig& c) {
  REQUIRE(t.records.size() == c.n_total);
  CHECK(t.accepted_set.size() == c.n_total);
  double best = INFINITY;
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    const auto& r = t.records[k];
    CHECK(r.step == k + 1);
    CHECK(r.phase == (k < c.n_init ? Phase::init : Phase::optimize));
    best = std::min(best, r.transformed_loss);
    CHECK(r.best_so_far == best);
    if (k > 0) CHECK(r.best_so_far <= t.records[k - 1].best_so_far);
    CHECK(r.accepted_energy.has_value() == (r.sample_type != SampleType::random));
    if (r.phase == Phase::init) CHECK(r.sample_type == SampleType::random);
  }
  CHECK(t.best().transformed_loss == best);
  CHECK(t.best_selection == t.best().accepted);
}

}  // namespace

TEST_CASE("transform_loss") {
  CHECK(transform_loss(1.0, LossTransform::log, 1e-15) == 0.0);
  CHECK(transform_loss(0.0, LossTransform::log, 1e-15) == doctest::Approx(-34.538776394910684));
  CHECK(transform_loss(0.3, LossTransform::identity, 1e-15) == 0.3);
  for (double a = 1e-6; a < 10.0; a *= 1.7) {
    CHECK(transform_loss(a, LossTransform::log, 1e-15) < transform_loss(a * 1.01, LossTransform::log, 1e-15));
  }
}

TEST_CASE("evaluate_selection") {
  const auto ds = generate_dataset(9, 64, 128, 128, 0);
  const TrainSettings s;
  CHECK(evaluate_selection(theoretical_solution(ds), ds, s) < std::log(2.0));
  CHECK(std::abs(evaluate_selection(BitVector(128), ds, s) - std::log(2.0)) <= 1e-12);
  // Every input appears once with each label, so the regularized optimum is
  // the zero model.
  CHECK(std::abs(evaluate_selection(BitVector::ones(128), ds, s) - std::log(2.0)) <= 1e-9);
  CHECK_THROWS_AS(evaluate_selection(BitVector(5), ds, s), Error);
}

TEST_CASE("accept_candidate") {
  Rng rng(1);
  const BitVector a{0, 0}, b{0, 1}, c{1, 0}, d{1, 1};
  const auto batch = make_batch({b, a, c}, {0.5, -1.0, 2.0});

  SUBCASE("empty accepted set takes the batch minimum") {
    const auto acc = accept_candidate(batch, {}, rng, 2);
    CHECK(acc.selection == a);
    CHECK(acc.type == SampleType::optimal);
    CHECK(acc.energy == -1.0);
  }
  SUBCASE("seen minimum falls through to the next energy") {
    const auto acc = accept_candidate(batch, AcceptedSet{a}, rng, 2);
    CHECK(acc.selection == b);
    CHECK(acc.type == SampleType::suboptimal);
    CHECK(acc.energy == 0.5);
  }
  SUBCASE("fully seen batch triggers the random fallback") {
    const auto acc = accept_candidate(batch, AcceptedSet{a, b, c}, rng, 2);
    CHECK(acc.selection == d);
    CHECK(acc.type == SampleType::random);
    CHECK_FALSE(acc.energy.has_value());
  }
  SUBCASE("duplicates within a batch are skipped individually") {
    const auto dup = make_batch({a, a, a, c}, {-1.0, -1.0, -1.0, 3.0});
    const auto acc = accept_candidate(dup, AcceptedSet{a}, rng, 2);
    CHECK(acc.selection == c);
    CHECK(acc.type == SampleType::suboptimal);
  }
  SUBCASE("an unseen state tied with the minimum is optimal") {
    const auto tied = make_batch({a, d, c}, {0.0, 0.0, 1.0});
    const auto acc = accept_candidate(tied, AcceptedSet{a}, rng, 2);
    CHECK(acc.selection == d);
    CHECK(acc.type == SampleType::optimal);
  }
  SUBCASE("ties resolve by read index") {
    const auto tied = make_batch({d, a}, {0.0, 0.0});
    CHECK(accept_candidate(tied, {}, rng, 2).selection == d);
  }
  SUBCASE("exhausted search space") {
    CHECK_THROWS_AS(accept_candidate(batch, AcceptedSet{a, b, c, d}, rng, 2), Error);
  }
  CHECK_THROWS_AS(accept_candidate(SampleBatch{}, {}, rng, 2), Error);
}

TEST_CASE("draw_unseen") {
  Rng rng(3);
  AcceptedSet seen;
  for (std::uint64_t v = 0; v < 8; ++v) {
    if (v != 5) seen.insert(BitVector::from_integer(v, 3));
  }
  CHECK(draw_unseen(seen, 3, rng) == BitVector::from_integer(5, 3));
  seen.insert(BitVector::from_integer(5, 3));
  CHECK_THROWS_AS(draw_unseen(seen, 3, rng), Error);
}

TEST_CASE("tiny run with the exhaustive sampler") {
  const auto ds = generate_dataset(3, 1, 2, 2, 0);
  REQUIRE(ds.train.size() == 2);
  const auto c = small_config(SamplerKind::exhaustive, 2, 3, 4);
  const auto t = run(ds, c);
  check_trace_invariants(t, c);
  CHECK(t.accepted_set.size() == 3);
}

TEST_CASE("refits use exactly the preceding records") {
  const auto ds = generate_dataset(5, 4, 8, 8, 2);
  const auto c = small_config(SamplerKind::exhaustive, 6, 30, 16);
  const auto t = run(ds, c);
  check_trace_invariants(t, c);
  Rng unused(0);
  for (std::size_t k = c.n_init; k < c.n_total; ++k) {
    if (t.records[k].sample_type == SampleType::random) continue;
    std::vector<ExpandedFeatures> f;
    std::vector<double> y;
    AcceptedSet seen;
    for (std::size_t j = 0; j < k; ++j) {
      f.push_back(expand(t.records[j].accepted));
      y.push_back(t.records[j].transformed_loss);
      seen.insert(t.records[j].accepted);
    }
    SamplerConfig sc = c.sampler;
    const auto batch = sample(to_qubo(fit_ridge(f, y, c.ridge_lambda)), sc);
    const auto acc = accept_candidate(batch, seen, unused, ds.train.size());
    CHECK(acc.selection == t.records[k].accepted);
    CHECK(acc.type == t.records[k].sample_type);
    CHECK(acc.energy == t.records[k].accepted_energy);
  }
}

TEST_CASE("SA run invariants, determinism and trace round-trip") {
  const auto ds = generate_dataset(7, 8, 16, 16, 1);
  auto c = small_config(SamplerKind::sa, 8, 40, 32);
  c.seed = 5;
  const auto t1 = run(ds, c);
  const auto t2 = run(ds, c);
  check_trace_invariants(t1, c);
  const auto text = trace_to_csv(t1);
  CHECK(text == trace_to_csv(t2));

  const auto back = trace_from_csv(text, ds.train.size());
  CHECK(back.records == t1.records);
  CHECK(back.best_index == t1.best_index);
  CHECK(back.best_selection == t1.best_selection);
  CHECK(trace_to_csv(back) == text);

  c.seed = 6;
  CHECK(trace_to_csv(run(ds, c)) != text);
}

TEST_CASE("SQA and random samplers drive the engine too") {
  const auto ds = generate_dataset(5, 4, 8, 8, 4);
  for (auto kind : {SamplerKind::sqa, SamplerKind::random}) {
    const auto c = small_config(kind, 4, 20, 16);
    check_trace_invariants(run(ds, c), c);
  }
}

TEST_CASE("search lands near the exhaustive optimum at n=8") {
  const auto ds = generate_dataset(7, 4, 32, 32, 0);
  EngineConfig c = small_config(SamplerKind::sa, 16, 80, 64);
  c.sampler.num_sweeps = 1000;
  std::vector<double> landscape;
  for (std::uint64_t v = 0; v < 256; ++v) {
    landscape.push_back(transform_loss(evaluate_selection(BitVector::from_integer(v, 8), ds, c.learner),
                                       LossTransform::log, 1e-15));
  }
  const auto optimum = BitVector::from_integer(
      static_cast<std::uint64_t>(std::min_element(landscape.begin(), landscape.end()) - landscape.begin()), 8);
  std::size_t optimum_removed_fake = 0;
  for (std::size_t i = 4; i < 8; ++i) optimum_removed_fake += optimum[i] ? 0 : 1;
  CHECK(optimum_removed_fake >= 3);

  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    c.seed = seed;
    const double found = run(ds, c).best().transformed_loss;
    const auto better = std::count_if(landscape.begin(), landscape.end(), [&](double l) { return l < found; });
    CHECK(better <= 12);
  }
}

TEST_CASE("engine configuration checks") {
  const auto ds = generate_dataset(3, 1, 2, 2, 0);
  EngineConfig c = small_config(SamplerKind::sa, 3, 3, 4);
  CHECK_THROWS_AS(run(ds, c), ConfigError);
  c = small_config(SamplerKind::sa, 0, 3, 4);
  CHECK_THROWS_AS(run(ds, c), ConfigError);
  c = small_config(SamplerKind::sa, 1, 3, 4);
  c.ridge_lambda = 0.0;
  CHECK_THROWS_AS(run(ds, c), ConfigError);
  c = small_config(SamplerKind::external, 1, 3, 4);
  CHECK_THROWS_AS(run(ds, c), Error);
}

TEST_CASE("run metadata records the constants") {
  EngineConfig c;
  const auto meta = run_metadata(c, 128);
  CHECK(meta.find("surrogate_coefficients=8257\n") != std::string::npos);
  CHECK(meta.find("num_reads=512\n") != std::string::npos);
  CHECK(meta.find("num_sweeps=1000\n") != std::string::npos);
  CHECK(meta.find("transform_floor=1e-15\n") != std::string::npos);
}
