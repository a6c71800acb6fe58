#include <doctest.h>

#include <set>

#include "cleanse/error.hpp"
#include "cleanse/task_data.hpp"

using namespace cleanse;

TEST_CASE("majority_bit") {
  CHECK(majority_bit({0, 0, 0, 1, 0, 1, 0, 0, 1}) == 0);
  CHECK(majority_bit({1, 1, 0, 1, 0, 1, 1, 0, 0}) == 1);
  CHECK(majority_bit({1, 1, 1, 1, 1, 1, 1, 1, 1}) == 1);
  CHECK_THROWS_AS(majority_bit({1, 0}), Error);
}

namespace {

void check_dataset_invariants(const Dataset& ds, std::size_t n_real) {
  REQUIRE(ds.train.size() == 2 * n_real);
  std::set<std::string> patterns;
  for (std::size_t i = 0; i < n_real; ++i) {
    CHECK(ds.train[i].provenance == Provenance::real);
    CHECK(ds.train[i].label == majority_bit(ds.train[i].input));
    CHECK(ds.train[n_real + i].provenance == Provenance::fake);
    CHECK(ds.train[n_real + i].input == ds.train[i].input);
    CHECK(ds.train[n_real + i].label == 1 - majority_bit(ds.train[i].input));
    patterns.insert(ds.train[i].input.to_string());
  }
  for (const auto* split : {&ds.valid, &ds.test}) {
    for (const auto& inst : *split) {
      CHECK(inst.provenance == Provenance::clean);
      CHECK(inst.label == majority_bit(inst.input));
      patterns.insert(inst.input.to_string());
    }
  }
  CHECK(patterns.size() == n_real + ds.valid.size() + ds.test.size());
}

}  // namespace

TEST_CASE("generate_dataset at the 9-bit 64/128/128 scale") {
  const auto ds = generate_dataset(9, 64, 128, 128, 0);
  CHECK(ds.bits == 9);
  CHECK(ds.valid.size() == 128);
  CHECK(ds.test.size() == 128);
  check_dataset_invariants(ds, 64);
}

TEST_CASE("generate_dataset exhausting all 3-bit patterns") {
  const auto ds = generate_dataset(3, 4, 2, 2, 7);
  CHECK(ds.train.size() == 8);
  CHECK(ds.valid.size() == 2);
  CHECK(ds.test.size() == 2);
  check_dataset_invariants(ds, 4);
}

TEST_CASE("generate_dataset rejects impossible requests") {
  CHECK_THROWS_AS(generate_dataset(3, 5, 2, 2, 0), Error);
  CHECK_THROWS_AS(generate_dataset(4, 1, 1, 1, 0), Error);
}

TEST_CASE("generate_dataset is a pure function of its arguments") {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    const auto a = generate_dataset(7, 16, 32, 32, seed);
    const auto b = generate_dataset(7, 16, 32, 32, seed);
    CHECK(a == b);
    CHECK(dataset_to_csv(a) == dataset_to_csv(b));
    check_dataset_invariants(a, 16);
  }
  CHECK(generate_dataset(7, 16, 32, 32, 1) != generate_dataset(7, 16, 32, 32, 2));
}

TEST_CASE("generate_dataset falls back to rejection sampling for wide inputs") {
  const auto ds = generate_dataset(23, 20, 10, 10, 3);
  check_dataset_invariants(ds, 20);
}

TEST_CASE("filter_train") {
  const auto ds = generate_dataset(5, 4, 4, 4, 1);
  CHECK(filter_train(ds, BitVector::ones(8)) == ds.train);
  CHECK(filter_train(ds, BitVector(8)).empty());
  const auto even = filter_train(ds, BitVector{1, 0, 1, 0, 1, 0, 1, 0});
  REQUIRE(even.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(even[i] == ds.train[2 * i]);
  CHECK_THROWS_AS(filter_train(ds, BitVector(7)), Error);
}

TEST_CASE("theoretical_solution keeps exactly the real instances") {
  const auto big = generate_dataset(9, 64, 128, 128, 0);
  const auto q = theoretical_solution(big);
  CHECK(q.count() == 64);
  for (std::size_t i = 0; i < 128; ++i) CHECK(q[i] == (i < 64));

  CHECK(theoretical_solution(generate_dataset(3, 2, 1, 1, 5)) == BitVector{1, 1, 0, 0});

  Dataset clean = big;
  clean.train.resize(64);
  CHECK(theoretical_solution(clean) == BitVector::ones(64));
}

TEST_CASE("dataset CSV round-trips byte for byte") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = generate_dataset(7, 8 + seed, 10, 12, seed);
    const auto text = dataset_to_csv(ds);
    const auto back = dataset_from_csv(text);
    CHECK(back == ds);
    CHECK(dataset_to_csv(back) == text);
  }
}

TEST_CASE("dataset CSV layout") {
  const auto ds = generate_dataset(3, 1, 1, 1, 0);
  const auto text = dataset_to_csv(ds);
  CHECK(text.rfind("split,index,provenance,x0,x1,x2,label\ntrain,0,real,", 0) == 0);
  CHECK_THROWS_AS(dataset_from_csv("split,index,provenance,x0,label\ntrain,0,real,2,1\n"), Error);
}
