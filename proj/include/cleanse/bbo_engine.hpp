#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cleanse/base_learner.hpp"
#include "cleanse/samplers.hpp"
#include "cleanse/task_data.hpp"

namespace cleanse {

enum class LossTransform { log, identity };
enum class Phase { init, optimize };
enum class SampleType { random, optimal, suboptimal };

std::string_view to_string(LossTransform t);
std::string_view to_string(Phase p);
std::string_view to_string(SampleType t);
LossTransform parse_loss_transform(std::string_view text);
Phase parse_phase(std::string_view text);
SampleType parse_sample_type(std::string_view text);

struct EngineConfig {
  std::size_t n_init = 64;
  std::size_t n_total = 320;
  LossTransform transform = LossTransform::log;
  double transform_floor = 1e-15;
  double ridge_lambda = 1.0;
  /// sampler.num_reads is the batch size M. sampler.seed is ignored: each
  /// step derives its sampler seed from `seed`.
  SamplerConfig sampler;
  TrainSettings learner;
  std::uint64_t seed = 0;
  /// When false, wall-clock fields are recorded as 0 so traces are
  /// byte-reproducible.
  bool record_timing = true;

  void validate() const;
};

struct StepRecord {
  std::size_t step = 0;  // 1-based
  Phase phase = Phase::init;
  SelectionVector accepted;
  SampleType sample_type = SampleType::random;
  std::optional<double> accepted_energy;
  double raw_loss = 0.0;
  double transformed_loss = 0.0;
  double best_so_far = 0.0;
  double sampling_time = 0.0;
  double eval_time = 0.0;
  // Energy spread of the step's sampler batch (optimization steps only).
  std::optional<double> batch_energy_mean;
  std::optional<double> batch_energy_std;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

using AcceptedSet = std::unordered_set<SelectionVector, BitVectorHash>;

struct RunTrace {
  std::vector<StepRecord> records;
  AcceptedSet accepted_set;
  std::size_t best_index = 0;  // position in `records`
  SelectionVector best_selection;

  const StepRecord& best() const { return records.at(best_index); }
};

/// g(raw): ln(max(raw, floor)) for the log transform, raw otherwise.
double transform_loss(double raw, LossTransform transform, double floor);

/// Validation log-loss of the base learner trained on the selected subset.
double evaluate_selection(const SelectionVector& q, const Dataset& dataset, const TrainSettings& settings);

struct Acceptance {
  SelectionVector selection;
  SampleType type = SampleType::random;
  std::optional<double> energy;
};

/// Uniform random selection not in `accepted`. After
/// 10 * 2^min(n, 20) failed draws the unseen states are enumerated in
/// increasing integer order instead. Throws when all 2^n states are taken.
SelectionVector draw_unseen(const AcceptedSet& accepted, std::size_t n, Rng& rng);

/// Postprocessing rule: scan the batch by ascending (energy, read index)
/// and take the first sample not yet accepted; it is `optimal` when its
/// energy equals the batch minimum and `suboptimal` otherwise. When every
/// sample was already accepted, fall back to draw_unseen() (`random`, no
/// energy).
Acceptance accept_candidate(const SampleBatch& batch, const AcceptedSet& accepted, Rng& rng, std::size_t n);

/// Sampler seed used at 1-based optimization step `step` of a run seeded
/// with `engine_seed`.
std::uint64_t step_sampler_seed(std::uint64_t engine_seed, std::size_t step);

/// Surrogate-guided subset search: n_init random selections, then
/// n_total - n_init steps of ridge refit on all previous
/// (expanded selection, transformed loss) pairs, QUBO sampling and
/// postprocessing acceptance. Deterministic in (dataset, config) except for
/// the timing fields.
RunTrace run(const Dataset& dataset, const EngineConfig& config);

/// Trace CSV. Selections are big-endian hex with instance 0 in the least
/// significant bit of the last digit.
std::string trace_to_csv(const RunTrace& trace);
RunTrace trace_from_csv(std::string_view text, std::size_t n, const std::string& origin = "trace");

/// key=value listing of every configuration value and fixed constant a run
/// depends on.
std::string run_metadata(const EngineConfig& config, std::size_t n);

}  // namespace cleanse
