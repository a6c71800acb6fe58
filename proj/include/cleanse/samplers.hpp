#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cleanse/bit_vector.hpp"
#include "cleanse/rng.hpp"
#include "cleanse/surrogate.hpp"

namespace cleanse {

/// `external` reserves the slot for a hardware annealer and is not
/// implemented.
enum class SamplerKind { sa, sqa, random, exhaustive, external };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view text);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::sa;
  std::size_t num_reads = 512;
  std::size_t num_sweeps = 1000;
  std::size_t trotter_slices = 4;
  /// Initial transverse field is this multiple of max|U|.
  double gamma_start_scale = 10.0;
  double gamma_end = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SampleBatch {
  std::vector<BitVector> samples;
  /// q^T U q of each sample, without the constant shift.
  std::vector<double> energies;
  double sampling_time = 0.0;  // seconds
};

struct ReadResult {
  BitVector state;
  double energy = 0.0;
};

/// Inverse temperatures bracketing the geometric SA schedule.
struct BetaRange {
  double hot = 0.1;
  double cold = 1.0;
};

inline constexpr std::size_t kExhaustiveMaxVariables = 24;

/// hot = ln 2 / dE_max, cold = ln(100 n) / dE_min, where dE_max bounds the
/// largest single-flip change by the absolute row/column sums of U and
/// dE_min is the smallest nonzero |U_ij|. A zero matrix gets [0.1, 1].
BetaRange default_beta_range(const QuboMatrix& u);

/// One simulated-annealing read: single-flip Metropolis sweeps over all n
/// variables in index order under the geometric schedule of
/// default_beta_range(), starting from a uniform random state. Flip costs
/// come from cached local fields, updated in O(n) per accepted flip.
ReadResult sa_read(const QuboMatrix& u, std::size_t num_sweeps, Rng& rng);

/// One simulated-quantum-annealing read: path-integral Monte Carlo over
/// `trotter_slices` coupled replicas at inverse temperature
/// default_beta_range().cold, with the transverse field decreased linearly
/// from gamma_start_scale * max|U| to gamma_end. Returns the replica with
/// the lowest classical energy.
ReadResult sqa_read(const QuboMatrix& u, std::size_t num_sweeps, std::size_t trotter_slices, Rng& rng,
                    double gamma_start_scale = 10.0, double gamma_end = 1e-8);

/// Draws config.num_reads samples. Read r uses the substream
/// derive_seed(config.seed, r), so results do not depend on execution
/// order. Reported energies are recomputed from the returned states.
/// The exhaustive kind returns the min(num_reads, 2^n) lowest states sorted
/// by energy, ties by integer index (bit i = variable i).
SampleBatch sample(const QuboMatrix& u, const SamplerConfig& config);

}  // namespace cleanse
