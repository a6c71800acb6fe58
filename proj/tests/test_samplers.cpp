#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cleanse/error.hpp"
#include "cleanse/samplers.hpp"

using namespace cleanse;

namespace {

QuboMatrix random_qubo(std::size_t n, Rng& rng) {
  QuboMatrix u(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) u.set(i, j, 2.0 * rng.uniform() - 1.0);
  }
  return u;
}

QuboMatrix ferro_pair() {
  QuboMatrix u(2);
  u.set(0, 0, 1.0);
  u.set(0, 1, -2.0);
  u.set(1, 1, 1.0);
  return u;
}

// Brute-force ground-state energy, summing the full matrix explicitly.
double brute_force_minimum(const QuboMatrix& u) {
  const std::size_t n = u.size();
  double best = INFINITY;
  for (std::uint64_t s = 0; s < (1ULL << n); ++s) {
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (((s >> i) & 1) && ((s >> j) & 1)) e += u(i, j);
      }
    }
    best = std::min(best, e);
  }
  return best;
}

}  // namespace

TEST_CASE("zero matrix gives zero energies for every sampler") {
  const QuboMatrix zero(5);
  for (auto kind : {SamplerKind::sa, SamplerKind::sqa, SamplerKind::random, SamplerKind::exhaustive}) {
    SamplerConfig c;
    c.kind = kind;
    c.num_reads = 16;
    c.num_sweeps = 20;
    const auto batch = sample(zero, c);
    CHECK(batch.samples.size() == 16);
    for (double e : batch.energies) CHECK(e == 0.0);
  }
  Rng rng(1);
  CHECK(sa_read(zero, 10, rng).energy == 0.0);
  CHECK(sqa_read(zero, 10, 4, rng).energy == 0.0);
}

TEST_CASE("SA finds the ground state of a two-variable ferromagnet") {
  SamplerConfig c;
  c.num_reads = 512;
  c.seed = 4;
  const auto batch = sample(ferro_pair(), c);
  CHECK(*std::min_element(batch.energies.begin(), batch.energies.end()) == 0.0);
  CHECK(brute_force_minimum(ferro_pair()) == 0.0);
}

TEST_CASE("exhaustive sampler returns states sorted by energy then index") {
  SamplerConfig c;
  c.kind = SamplerKind::exhaustive;
  c.num_reads = 4;
  const auto batch = sample(ferro_pair(), c);
  REQUIRE(batch.samples.size() == 4);
  CHECK(batch.samples[0] == BitVector{0, 0});
  CHECK(batch.samples[1] == BitVector{1, 1});
  CHECK(batch.samples[2] == BitVector{1, 0});
  CHECK(batch.samples[3] == BitVector{0, 1});
  CHECK(batch.energies == std::vector<double>{0.0, 0.0, 1.0, 1.0});

  c.num_reads = 100;
  CHECK(sample(ferro_pair(), c).samples.size() == 4);
}

TEST_CASE("exhaustive sampler agrees with brute force") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    const auto u = random_qubo(10, rng);
    SamplerConfig c;
    c.kind = SamplerKind::exhaustive;
    c.num_reads = 8;
    const auto batch = sample(u, c);
    CHECK(batch.energies.front() == doctest::Approx(brute_force_minimum(u)).epsilon(1e-12));
    CHECK(std::is_sorted(batch.energies.begin(), batch.energies.end()));
  }
}

TEST_CASE("sampler errors") {
  SamplerConfig c;
  c.kind = SamplerKind::exhaustive;
  CHECK_THROWS_AS(sample(QuboMatrix(25), c), Error);
  c.kind = SamplerKind::external;
  CHECK_THROWS_AS(sample(QuboMatrix(3), c), Error);
  c.kind = SamplerKind::sa;
  c.num_reads = 0;
  CHECK_THROWS_AS(sample(QuboMatrix(3), c), ConfigError);
  c = SamplerConfig{};
  c.kind = SamplerKind::sqa;
  c.trotter_slices = 1;
  CHECK_THROWS_AS(sample(QuboMatrix(3), c), ConfigError);
  QuboMatrix bad(2);
  bad.set(0, 1, NAN);
  CHECK_THROWS_AS(sample(bad, SamplerConfig{}), Error);
}

TEST_CASE("single-variable minimum") {
  QuboMatrix u(1);
  u.set(0, 0, -5.0);
  Rng rng(2);
  const auto sa = sa_read(u, 1000, rng);
  CHECK(sa.state == BitVector{1});
  CHECK(sa.energy == -5.0);
  const auto sqa = sqa_read(u, 1000, 4, rng);
  CHECK(sqa.state == BitVector{1});
  CHECK(sqa.energy == -5.0);
}

TEST_CASE("default_beta_range") {
  const auto zero = default_beta_range(QuboMatrix(3));
  CHECK(zero.hot == 0.1);
  CHECK(zero.cold == 1.0);
  // Row bounds: |1| + |-2| = 3 for both variables; smallest |entry| = 1.
  const auto r = default_beta_range(ferro_pair());
  CHECK(r.hot == doctest::Approx(std::log(2.0) / 3.0));
  CHECK(r.cold == doctest::Approx(std::log(200.0)));
}

TEST_CASE("SA reads hit the brute-force minimum on n=12") {
  Rng rng(2024);  // instance seed
  const auto u = random_qubo(12, rng);
  const double ground = brute_force_minimum(u);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < 512; ++r) {
    Rng read_rng(derive_seed(99, r));
    const auto res = sa_read(u, 1000, read_rng);
    CHECK(std::abs(res.energy - qubo_energy(u, res.state)) <= 1e-9);
    if (std::abs(res.energy - ground) <= 1e-9) ++hits;
  }
  CHECK(static_cast<double>(hits) / 512.0 >= 0.5);
}

TEST_CASE("SQA best-of-512 matches brute force on n=12") {
  Rng rng(7);
  int matches = 0;
  for (int instance = 0; instance < 20; ++instance) {
    const auto u = random_qubo(12, rng);
    SamplerConfig c;
    c.kind = SamplerKind::sqa;
    c.num_reads = 512;
    c.seed = static_cast<std::uint64_t>(instance);
    const auto batch = sample(u, c);
    const double best = *std::min_element(batch.energies.begin(), batch.energies.end());
    if (std::abs(best - brute_force_minimum(u)) <= 1e-9) ++matches;
  }
  CHECK(matches >= 19);
}

TEST_CASE("batches are deterministic, honest and built from per-read substreams") {
  Rng rng(5);
  const auto u = random_qubo(16, rng);
  for (auto kind : {SamplerKind::sa, SamplerKind::sqa, SamplerKind::random}) {
    SamplerConfig c;
    c.kind = kind;
    c.num_reads = 24;
    c.num_sweeps = 200;
    c.seed = 31;
    const auto a = sample(u, c);
    const auto b = sample(u, c);
    CHECK(a.samples == b.samples);
    CHECK(a.energies == b.energies);
    for (std::size_t r = 0; r < a.samples.size(); ++r) {
      CHECK(std::abs(a.energies[r] - qubo_energy(u, a.samples[r])) <= 1e-9);
    }
    if (kind == SamplerKind::sa) {
      for (std::size_t r = 0; r < a.samples.size(); ++r) {
        Rng read_rng(derive_seed(c.seed, r));
        CHECK(sa_read(u, c.num_sweeps, read_rng).state == a.samples[r]);
      }
    }
  }
}

TEST_CASE("sampler kind names round-trip") {
  for (auto kind : {SamplerKind::sa, SamplerKind::sqa, SamplerKind::random, SamplerKind::exhaustive,
                    SamplerKind::external}) {
    CHECK(parse_sampler_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_sampler_kind("dwave"), ConfigError);
}
