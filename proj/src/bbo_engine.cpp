#include "cleanse/bbo_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"
#include "cleanse/surrogate.hpp"

namespace cleanse {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kFallbackStream = 0xfa11;
constexpr std::uint64_t kSamplerStream = 0x5a3b;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Next state after `v` in increasing integer order (bit 0 least
// significant); returns false on wrap-around.
bool increment(BitVector& v) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    v.flip(i);
    if (v[i]) return true;
  }
  return false;
}

std::string optional_to_csv(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::optional<double> optional_from_csv(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  return csv::parse_double(cell);
}

}  // namespace

std::string_view to_string(LossTransform t) { return t == LossTransform::log ? "log" : "identity"; }
std::string_view to_string(Phase p) { return p == Phase::init ? "init" : "optimize"; }

std::string_view to_string(SampleType t) {
  switch (t) {
    case SampleType::random: return "random";
    case SampleType::optimal: return "optimal";
    case SampleType::suboptimal: return "suboptimal";
  }
  return "random";
}

LossTransform parse_loss_transform(std::string_view text) {
  if (text == "log") return LossTransform::log;
  if (text == "identity") return LossTransform::identity;
  throw ConfigError("unknown transform '" + std::string(text) + "' (expected log or identity)");
}

Phase parse_phase(std::string_view text) {
  if (text == "init") return Phase::init;
  if (text == "optimize") return Phase::optimize;
  throw Error("unknown phase '" + std::string(text) + "'");
}

SampleType parse_sample_type(std::string_view text) {
  if (text == "random") return SampleType::random;
  if (text == "optimal") return SampleType::optimal;
  if (text == "suboptimal") return SampleType::suboptimal;
  throw Error("unknown sample type '" + std::string(text) + "'");
}

void EngineConfig::validate() const {
  if (n_init < 1) throw ConfigError("n_init must be at least 1");
  if (n_init >= n_total) throw ConfigError("n_init must be smaller than n_total");
  if (!(transform_floor > 0.0)) throw ConfigError("transform_floor must be positive");
  if (!(ridge_lambda > 0.0) || !std::isfinite(ridge_lambda)) throw ConfigError("ridge_lambda must be positive");
  sampler.validate();
  learner.validate();
}

double transform_loss(double raw, LossTransform transform, double floor) {
  if (transform == LossTransform::identity) return raw;
  return std::log(std::max(raw, floor));
}

double evaluate_selection(const SelectionVector& q, const Dataset& dataset, const TrainSettings& settings) {
  const auto subset = filter_train(dataset, q);
  const auto model = train(subset, dataset.bits, settings);
  return log_loss(model, dataset.valid);
}

SelectionVector draw_unseen(const AcceptedSet& accepted, std::size_t n, Rng& rng) {
  if (n < 64 && accepted.size() >= (std::uint64_t{1} << n)) {
    throw Error("draw_unseen: all 2^" + std::to_string(n) + " selections have already been accepted");
  }
  const std::uint64_t cap = 10 * (std::uint64_t{1} << std::min<std::size_t>(n, 20));
  for (std::uint64_t attempt = 0; attempt < cap; ++attempt) {
    auto candidate = BitVector::random(n, rng);
    if (!accepted.contains(candidate)) return candidate;
  }
  BitVector candidate(n);
  do {
    if (!accepted.contains(candidate)) return candidate;
  } while (increment(candidate));
  throw Error("draw_unseen: no unseen selection exists");
}

Acceptance accept_candidate(const SampleBatch& batch, const AcceptedSet& accepted, Rng& rng, std::size_t n) {
  if (batch.samples.empty()) throw Error("accept_candidate: empty sample batch");
  if (batch.samples.size() != batch.energies.size()) throw Error("accept_candidate: batch energies do not match samples");
  std::vector<std::size_t> order(batch.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return batch.energies[a] < batch.energies[b]; });
  const double min_energy = batch.energies[order.front()];
  for (auto r : order) {
    if (batch.samples[r].size() != n) throw Error("accept_candidate: sample length does not match n");
    if (accepted.contains(batch.samples[r])) continue;
    const double e = batch.energies[r];
    return {batch.samples[r], e == min_energy ? SampleType::optimal : SampleType::suboptimal, e};
  }
  return {draw_unseen(accepted, n, rng), SampleType::random, std::nullopt};
}

std::uint64_t step_sampler_seed(std::uint64_t engine_seed, std::size_t step) {
  return derive_seed(derive_seed(engine_seed, kSamplerStream), step);
}

RunTrace run(const Dataset& dataset, const EngineConfig& config) {
  config.validate();
  const std::size_t n = dataset.train.size();
  if (n == 0) throw Error("run: the training set is empty");
  if (dataset.valid.empty()) throw Error("run: the validation set is empty");

  Rng init_rng(derive_seed(config.seed, kInitStream));
  Rng fallback_rng(derive_seed(config.seed, kFallbackStream));

  RunTrace trace;
  std::vector<ExpandedFeatures> features;
  std::vector<double> targets;
  features.reserve(config.n_total);
  targets.reserve(config.n_total);

  for (std::size_t k = 1; k <= config.n_total; ++k) {
    StepRecord rec;
    rec.step = k;
    const auto t_sample = Clock::now();
    if (k <= config.n_init) {
      rec.phase = Phase::init;
      rec.accepted = draw_unseen(trace.accepted_set, n, init_rng);
      rec.sample_type = SampleType::random;
      rec.sampling_time = seconds_since(t_sample);
    } else {
      rec.phase = Phase::optimize;
      const auto coeffs = fit_ridge(features, targets, config.ridge_lambda);
      const auto qubo = to_qubo(coeffs);
      SamplerConfig sc = config.sampler;
      sc.seed = step_sampler_seed(config.seed, k);
      const auto batch = sample(qubo, sc);
      rec.sampling_time = batch.sampling_time;

      const double count = static_cast<double>(batch.energies.size());
      const double mean = std::accumulate(batch.energies.begin(), batch.energies.end(), 0.0) / count;
      double var = 0.0;
      for (double e : batch.energies) var += (e - mean) * (e - mean);
      rec.batch_energy_mean = mean;
      rec.batch_energy_std = std::sqrt(var / count);

      auto acc = accept_candidate(batch, trace.accepted_set, fallback_rng, n);
      rec.accepted = std::move(acc.selection);
      rec.sample_type = acc.type;
      rec.accepted_energy = acc.energy;
    }

    const auto t_eval = Clock::now();
    rec.raw_loss = evaluate_selection(rec.accepted, dataset, config.learner);
    rec.transformed_loss = transform_loss(rec.raw_loss, config.transform, config.transform_floor);
    rec.eval_time = seconds_since(t_eval);
    if (!config.record_timing) {
      rec.sampling_time = 0.0;
      rec.eval_time = 0.0;
    }

    if (trace.records.empty() || rec.transformed_loss < trace.records[trace.best_index].transformed_loss) {
      trace.best_index = trace.records.size();
    }
    rec.best_so_far = trace.records.empty()
                          ? rec.transformed_loss
                          : std::min(trace.records.back().best_so_far, rec.transformed_loss);

    features.push_back(expand(rec.accepted));
    targets.push_back(rec.transformed_loss);
    trace.accepted_set.insert(rec.accepted);
    trace.records.push_back(std::move(rec));
  }
  trace.best_selection = trace.records[trace.best_index].accepted;
  return trace;
}

std::string trace_to_csv(const RunTrace& trace) {
  std::string out =
      "step,phase,sample_type,accepted_energy,raw_loss,transformed_loss,best_so_far,sampling_time_s,eval_time_s,"
      "selection_hex,batch_energy_mean,batch_energy_std\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.step);
    out += ',';
    out += to_string(r.phase);
    out += ',';
    out += to_string(r.sample_type);
    out += ',' + optional_to_csv(r.accepted_energy);
    out += ',' + csv::format_double(r.raw_loss);
    out += ',' + csv::format_double(r.transformed_loss);
    out += ',' + csv::format_double(r.best_so_far);
    out += ',' + csv::format_double(r.sampling_time);
    out += ',' + csv::format_double(r.eval_time);
    out += ',' + r.accepted.to_hex();
    out += ',' + optional_to_csv(r.batch_energy_mean);
    out += ',' + optional_to_csv(r.batch_energy_std);
    out += '\n';
  }
  return out;
}

RunTrace trace_from_csv(std::string_view text, std::size_t n, const std::string& origin) {
  const auto table = csv::parse(text, origin);
  const auto c_step = table.column("step");
  const auto c_phase = table.column("phase");
  const auto c_type = table.column("sample_type");
  const auto c_energy = table.column("accepted_energy");
  const auto c_raw = table.column("raw_loss");
  const auto c_trans = table.column("transformed_loss");
  const auto c_best = table.column("best_so_far");
  const auto c_ts = table.column("sampling_time_s");
  const auto c_te = table.column("eval_time_s");
  const auto c_sel = table.column("selection_hex");
  const auto c_bmean = table.column("batch_energy_mean");
  const auto c_bstd = table.column("batch_energy_std");

  RunTrace trace;
  for (const auto& row : table.rows) {
    StepRecord r;
    r.step = static_cast<std::size_t>(csv::parse_int(row[c_step]));
    r.phase = parse_phase(row[c_phase]);
    r.sample_type = parse_sample_type(row[c_type]);
    r.accepted_energy = optional_from_csv(row[c_energy]);
    r.raw_loss = csv::parse_double(row[c_raw]);
    r.transformed_loss = csv::parse_double(row[c_trans]);
    r.best_so_far = csv::parse_double(row[c_best]);
    r.sampling_time = csv::parse_double(row[c_ts]);
    r.eval_time = csv::parse_double(row[c_te]);
    r.accepted = BitVector::from_hex(row[c_sel], n);
    r.batch_energy_mean = optional_from_csv(row[c_bmean]);
    r.batch_energy_std = optional_from_csv(row[c_bstd]);
    if (trace.records.empty() || r.transformed_loss < trace.records[trace.best_index].transformed_loss) {
      trace.best_index = trace.records.size();
    }
    trace.accepted_set.insert(r.accepted);
    trace.records.push_back(std::move(r));
  }
  if (trace.records.empty()) throw Error(origin + ": trace has no records");
  trace.best_selection = trace.records[trace.best_index].accepted;
  return trace;
}

std::string run_metadata(const EngineConfig& config, std::size_t n) {
  auto line = [](std::string_view key, const std::string& value) {
    return std::string(key) + "=" + value + "\n";
  };
  std::string out;
  out += line("n", std::to_string(n));
  out += line("surrogate_coefficients", std::to_string(coefficient_count(n)));
  out += line("n_init", std::to_string(config.n_init));
  out += line("n_total", std::to_string(config.n_total));
  out += line("num_reads", std::to_string(config.sampler.num_reads));
  out += line("sampler", std::string(to_string(config.sampler.kind)));
  out += line("num_sweeps", std::to_string(config.sampler.num_sweeps));
  out += line("trotter_slices", std::to_string(config.sampler.trotter_slices));
  out += line("gamma_start_scale", csv::format_double(config.sampler.gamma_start_scale));
  out += line("gamma_end", csv::format_double(config.sampler.gamma_end));
  out += line("transform", std::string(to_string(config.transform)));
  out += line("transform_floor", csv::format_double(config.transform_floor));
  out += line("ridge_lambda", csv::format_double(config.ridge_lambda));
  out += line("ridge_intercept_penalized", "false");
  out += line("l2_strength", csv::format_double(config.learner.l2_strength));
  out += line("bias_penalized", "false");
  out += line("max_iterations", std::to_string(config.learner.max_iterations));
  out += line("tolerance", csv::format_double(config.learner.convergence_tolerance));
  out += line("probability_clamp", csv::format_double(kProbabilityClamp));
  out += line("seed", std::to_string(config.seed));
  out += line("record_timing", config.record_timing ? "true" : "false");
  out += line("sa_schedule", "geometric beta from ln(2)/dE_max to ln(100n)/dE_min");
  out += line("sqa_beta", "ln(100n)/dE_min");
  out += line("pairwise_order", "row-major (0,1),(0,2),...,(n-2,n-1)");
  out += line("energy_tie_break", "ascending energy then read index");
  out += line("init_phase_deduplicated", "true");
  out += line("fallback_retry_cap", "10*2^min(n,20)");
  return out;
}

}  // namespace cleanse
