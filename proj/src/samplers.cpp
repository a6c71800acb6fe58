#include "cleanse/samplers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>

#include "cleanse/error.hpp"

namespace cleanse {

namespace {

// Metropolis acceptance below exp(-44.36) ~ 2^-64 is indistinguishable
// from zero for a 64-bit uniform draw; skip the exp() call there.
constexpr double kSkipExponent = 44.36142;

// Symmetric couplings W (zero diagonal) plus the linear terms, so the
// flip cost of variable i is (1 - 2 q_i) * (linear_i + field_i).
struct Couplings {
  std::size_t n = 0;
  std::vector<double> linear;
  std::vector<double> w;  // n x n, row-major

  explicit Couplings(const QuboMatrix& u) : n(u.size()), linear(n), w(n * n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      linear[i] = u(i, i);
      for (std::size_t j = i + 1; j < n; ++j) {
        w[i * n + j] = u(i, j);
        w[j * n + i] = u(i, j);
      }
    }
  }

  const double* row(std::size_t i) const { return w.data() + i * n; }
};

// Replica state with cached local fields and running energy.
struct Replica {
  std::vector<unsigned char> bits;
  std::vector<double> field;
  double energy = 0.0;

  Replica(const Couplings& c, Rng& rng) : bits(c.n), field(c.n, 0.0) {
    const auto init = BitVector::random(c.n, rng);
    for (std::size_t i = 0; i < c.n; ++i) bits[i] = init[i] ? 1 : 0;
    for (std::size_t i = 0; i < c.n; ++i) {
      if (!bits[i]) continue;
      energy += c.linear[i];
      const double* r = c.row(i);
      for (std::size_t j = 0; j < c.n; ++j) field[j] += r[j];
    }
    for (std::size_t i = 0; i < c.n; ++i) {
      for (std::size_t j = i + 1; j < c.n; ++j) {
        if (bits[i] && bits[j]) energy += c.w[i * c.n + j];
      }
    }
  }

  double flip_cost(const Couplings& c, std::size_t i) const {
    const double local = c.linear[i] + field[i];
    return bits[i] ? -local : local;
  }

  void flip(const Couplings& c, std::size_t i, double cost) {
    const double sign = bits[i] ? -1.0 : 1.0;
    bits[i] ^= 1;
    energy += cost;
    const double* r = c.row(i);
    for (std::size_t j = 0; j < c.n; ++j) field[j] += sign * r[j];
  }

  BitVector to_bit_vector() const {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) v.set(i, bits[i] != 0);
    return v;
  }
};

std::vector<double> geometric_schedule(const BetaRange& range, std::size_t sweeps) {
  std::vector<double> betas(sweeps);
  if (sweeps == 1) {
    betas[0] = range.cold;
    return betas;
  }
  const double ratio = range.cold / range.hot;
  for (std::size_t s = 0; s < sweeps; ++s) {
    betas[s] = range.hot * std::pow(ratio, static_cast<double>(s) / static_cast<double>(sweeps - 1));
  }
  return betas;
}

ReadResult anneal(const Couplings& c, const std::vector<double>& betas, Rng& rng) {
  Replica rep(c, rng);
  for (double beta : betas) {
    const double threshold = kSkipExponent / beta;
    for (std::size_t i = 0; i < c.n; ++i) {
      const double cost = rep.flip_cost(c, i);
      if (cost <= 0.0 || (cost < threshold && std::exp(-beta * cost) > rng.uniform())) rep.flip(c, i, cost);
    }
  }
  return {rep.to_bit_vector(), rep.energy};
}

struct QuantumSchedule {
  double beta = 1.0;
  std::size_t slices = 4;
  std::vector<double> gammas;
};

QuantumSchedule quantum_schedule(const QuboMatrix& u, std::size_t sweeps, std::size_t slices, double gamma_start_scale,
                                 double gamma_end) {
  QuantumSchedule qs;
  qs.beta = default_beta_range(u).cold;
  qs.slices = slices;
  qs.gammas.resize(sweeps);
  const double start = gamma_start_scale * u.max_abs();
  for (std::size_t s = 0; s < sweeps; ++s) {
    const double t = sweeps == 1 ? 1.0 : static_cast<double>(s) / static_cast<double>(sweeps - 1);
    qs.gammas[s] = start + (gamma_end - start) * t;
  }
  return qs;
}

ReadResult quantum_anneal(const Couplings& c, const QuantumSchedule& qs, Rng& rng) {
  const std::size_t p = qs.slices;
  std::vector<Replica> replicas;
  replicas.reserve(p);
  for (std::size_t k = 0; k < p; ++k) replicas.emplace_back(c, rng);

  const double slice_beta = qs.beta / static_cast<double>(p);
  for (double gamma : qs.gammas) {
    // Inter-slice ferromagnetic coupling of the Suzuki-Trotter mapping,
    // J = -1/2 ln tanh(beta * Gamma / P), in units where the action is
    // slice_beta * E_k - J * sum_i s_i^k s_i^{k+1} with spins s = 2q - 1.
    const double x = std::max(slice_beta * std::max(gamma, 0.0), 1e-300);
    const double j_perp = -0.5 * std::log(std::tanh(x));
    for (std::size_t k = 0; k < p; ++k) {
      Replica& rep = replicas[k];
      const Replica& prev = replicas[(k + p - 1) % p];
      const Replica& next = replicas[(k + 1) % p];
      for (std::size_t i = 0; i < c.n; ++i) {
        const double cost = rep.flip_cost(c, i);
        const double spin = rep.bits[i] ? 1.0 : -1.0;
        const double neighbours = (prev.bits[i] ? 1.0 : -1.0) + (next.bits[i] ? 1.0 : -1.0);
        const double action = slice_beta * cost + 2.0 * j_perp * spin * neighbours;
        if (action <= 0.0 || (action < kSkipExponent && std::exp(-action) > rng.uniform())) rep.flip(c, i, cost);
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < p; ++k) {
    if (replicas[k].energy < replicas[best].energy) best = k;
  }
  return {replicas[best].to_bit_vector(), replicas[best].energy};
}

// Gray-code walk over all 2^n states keeping the `keep` lowest by
// (energy, index).
std::vector<std::uint64_t> lowest_states(const QuboMatrix& u, std::size_t keep) {
  const std::size_t n = u.size();
  const Couplings c(u);
  using Entry = std::pair<double, std::uint64_t>;
  std::priority_queue<Entry> heap;  // max-heap: worst kept entry on top
  auto offer = [&](double energy, std::uint64_t index) {
    if (heap.size() < keep) {
      heap.emplace(energy, index);
    } else if (Entry{energy, index} < heap.top()) {
      heap.pop();
      heap.emplace(energy, index);
    }
  };
  std::vector<double> field(n, 0.0);
  std::vector<unsigned char> bits(n, 0);
  double energy = 0.0;
  std::uint64_t index = 0;
  offer(energy, index);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto i = static_cast<std::size_t>(std::countr_zero(step));
    const double local = c.linear[i] + field[i];
    const double sign = bits[i] ? -1.0 : 1.0;
    energy += sign * local;
    bits[i] ^= 1;
    index ^= std::uint64_t{1} << i;
    const double* r = c.row(i);
    for (std::size_t j = 0; j < n; ++j) field[j] += sign * r[j];
    offer(energy, index);
  }
  std::vector<std::uint64_t> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top().second);
    heap.pop();
  }
  return out;
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::sa: return "sa";
    case SamplerKind::sqa: return "sqa";
    case SamplerKind::random: return "random";
    case SamplerKind::exhaustive: return "exhaustive";
    case SamplerKind::external: return "external";
  }
  return "sa";
}

SamplerKind parse_sampler_kind(std::string_view text) {
  if (text == "sa") return SamplerKind::sa;
  if (text == "sqa") return SamplerKind::sqa;
  if (text == "random") return SamplerKind::random;
  if (text == "exhaustive") return SamplerKind::exhaustive;
  if (text == "external") return SamplerKind::external;
  throw ConfigError("unknown sampler kind '" + std::string(text) + "' (expected sa, sqa, random, exhaustive, external)");
}

void SamplerConfig::validate() const {
  if (num_reads < 1) throw ConfigError("num_reads must be at least 1");
  if ((kind == SamplerKind::sa || kind == SamplerKind::sqa) && num_sweeps < 1) {
    throw ConfigError("num_sweeps must be at least 1");
  }
  if (kind == SamplerKind::sqa && trotter_slices < 2) throw ConfigError("trotter_slices must be at least 2");
  if (!(gamma_start_scale >= 0.0) || !(gamma_end >= 0.0)) throw ConfigError("transverse field must be non-negative");
}

BetaRange default_beta_range(const QuboMatrix& u) {
  const std::size_t n = u.size();
  double min_delta = std::numeric_limits<double>::infinity();
  double max_delta = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double bound = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = i <= j ? u(i, j) : u(j, i);
      if (v != 0.0) {
        bound += std::abs(v);
        min_delta = std::min(min_delta, std::abs(v));
      }
    }
    max_delta = std::max(max_delta, bound);
  }
  if (max_delta == 0.0) return {};
  return {std::log(2.0) / max_delta, std::log(100.0 * static_cast<double>(n)) / min_delta};
}

ReadResult sa_read(const QuboMatrix& u, std::size_t num_sweeps, Rng& rng) {
  const Couplings c(u);
  return anneal(c, geometric_schedule(default_beta_range(u), num_sweeps), rng);
}

ReadResult sqa_read(const QuboMatrix& u, std::size_t num_sweeps, std::size_t trotter_slices, Rng& rng,
                    double gamma_start_scale, double gamma_end) {
  if (trotter_slices < 2) throw Error("sqa_read: at least two Trotter slices are required");
  const Couplings c(u);
  return quantum_anneal(c, quantum_schedule(u, num_sweeps, trotter_slices, gamma_start_scale, gamma_end), rng);
}

SampleBatch sample(const QuboMatrix& u, const SamplerConfig& config) {
  config.validate();
  if (!u.all_finite()) throw Error("sample: QUBO matrix has non-finite entries");
  const std::size_t n = u.size();
  const std::size_t reads = config.num_reads;

  SampleBatch batch;
  std::vector<double> running;  // energies tracked during sampling
  const auto t0 = std::chrono::steady_clock::now();
  switch (config.kind) {
    case SamplerKind::sa: {
      const Couplings c(u);
      const auto betas = geometric_schedule(default_beta_range(u), config.num_sweeps);
      for (std::size_t r = 0; r < reads; ++r) {
        Rng rng(derive_seed(config.seed, r));
        auto res = anneal(c, betas, rng);
        batch.samples.push_back(std::move(res.state));
        running.push_back(res.energy);
      }
      break;
    }
    case SamplerKind::sqa: {
      const Couplings c(u);
      const auto qs = quantum_schedule(u, config.num_sweeps, config.trotter_slices, config.gamma_start_scale,
                                       config.gamma_end);
      for (std::size_t r = 0; r < reads; ++r) {
        Rng rng(derive_seed(config.seed, r));
        auto res = quantum_anneal(c, qs, rng);
        batch.samples.push_back(std::move(res.state));
        running.push_back(res.energy);
      }
      break;
    }
    case SamplerKind::random: {
      for (std::size_t r = 0; r < reads; ++r) {
        Rng rng(derive_seed(config.seed, r));
        batch.samples.push_back(BitVector::random(n, rng));
      }
      break;
    }
    case SamplerKind::exhaustive: {
      if (n > kExhaustiveMaxVariables) {
        throw Error("sample: exhaustive sampler supports at most " + std::to_string(kExhaustiveMaxVariables) +
                    " variables, got " + std::to_string(n));
      }
      const std::size_t keep = std::min<std::uint64_t>(reads, std::uint64_t{1} << n);
      for (auto index : lowest_states(u, keep)) batch.samples.push_back(BitVector::from_integer(index, n));
      break;
    }
    case SamplerKind::external:
      throw Error("sample: the external (hardware) sampler is not available in this build");
  }
  batch.sampling_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  batch.energies.reserve(batch.samples.size());
  for (std::size_t r = 0; r < batch.samples.size(); ++r) {
    const double exact = qubo_energy(u, batch.samples[r]);
    if (!running.empty()) {
      const double tol = 1e-9 * std::max(1.0, std::abs(exact));
      if (std::abs(running[r] - exact) > tol) {
        throw Error("sample: incremental energy drifted from recomputation in read " + std::to_string(r));
      }
    }
    batch.energies.push_back(exact);
  }

  if (config.kind == SamplerKind::exhaustive) {
    // Gray-code energies carry rounding; order by the recomputed values.
    std::vector<std::size_t> order(batch.samples.size());
    std::vector<std::uint64_t> index(batch.samples.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      order[r] = r;
      index[r] = batch.samples[r].words().empty() ? 0 : batch.samples[r].words()[0];
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (batch.energies[a] != batch.energies[b]) return batch.energies[a] < batch.energies[b];
      return index[a] < index[b];
    });
    SampleBatch sorted;
    sorted.sampling_time = batch.sampling_time;
    for (auto r : order) {
      sorted.samples.push_back(batch.samples[r]);
      sorted.energies.push_back(batch.energies[r]);
    }
    batch = std::move(sorted);
  }
  return batch;
}

}  // namespace cleanse
