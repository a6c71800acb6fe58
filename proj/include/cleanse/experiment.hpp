#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cleanse/bbo_engine.hpp"
#include "cleanse/task_data.hpp"

namespace cleanse {

/// Full experiment description. Defaults are the 9-bit, 64/128/128,
/// N0=64, N=320, M=512, 32-seed setup.
struct ExperimentConfig {
  std::size_t bits = 9;
  std::size_t n_real = 64;
  std::size_t n_valid = 128;
  std::size_t n_test = 128;
  std::uint64_t dataset_seed = 0;
  /// engine.seed is replaced by each entry of `seeds`.
  EngineConfig engine;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir = "results";

  ExperimentConfig();

  void validate() const;
  /// Flat key=value form accepted by parse_config().
  std::string to_text() const;
};

/// Applies one `key=value` assignment. Throws ConfigError for unknown keys
/// or malformed values.
void apply_setting(ExperimentConfig& config, std::string_view assignment);

/// Parses key=value lines; blank lines and `#` comments are ignored.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// "0..31", "1,4,9" and mixtures such as "0..3,7".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

Dataset make_dataset(const ExperimentConfig& config);

struct RunSummary {
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double best_raw_loss = 0.0;
  double best_transformed_loss = 0.0;
  std::size_t best_step = 0;
  std::size_t hamming_to_theoretical = 0;
  std::size_t removed_real = 0;
  std::size_t removed_fake = 0;
  // Log-loss of the model trained on the best subset.
  double loss_train_all = 0.0;
  double loss_train_optimized = 0.0;  // NaN when the best subset is empty
  double loss_valid = 0.0;
  double loss_test = 0.0;
};

struct InstanceSummary {
  std::size_t instance = 0;
  Provenance provenance = Provenance::real;
  std::size_t summed_input = 0;
  double deviance = 0.0;
  double entropy = 0.0;
  double removal_probability = 0.0;
};

struct StepTiming {
  std::size_t step = 0;
  double mean = 0.0;
  double sem = 0.0;
  double lower95 = 0.0;
  double upper95 = 0.0;
};

struct AnalysisSummary {
  std::vector<RunSummary> runs;
  std::vector<InstanceSummary> instances;
  std::vector<StepTiming> timing;
  /// Over all optimization steps of all runs.
  double sampling_time_mean = 0.0;
  double sampling_time_std = 0.0;
  /// Spearman correlation of fake-instance deviance and removal probability.
  double fake_deviance_removal_spearman = 0.0;
};

AnalysisSummary analyze_runs(const ExperimentConfig& config, const Dataset& dataset,
                             std::span<const RunTrace> traces);

/// Writes removal.csv, losses.csv, instances.csv, solutions.csv,
/// energies.csv, timing.csv and summary.csv into `dir`.
void write_aggregates(const std::filesystem::path& dir, const ExperimentConfig& config, const AnalysisSummary& summary,
                      std::span<const RunTrace> traces);

std::filesystem::path run_directory(const std::filesystem::path& root, std::uint64_t seed);

struct ExperimentResult {
  Dataset dataset;
  std::vector<RunTrace> traces;
  AnalysisSummary summary;
};

/// Runs every seed and writes experiment.cfg, dataset.csv,
/// runs/seed_<s>/{trace.csv,run.meta} and the aggregate files under
/// config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Recomputes the aggregates from a directory written by run_experiment().
ExperimentResult analyze_directory(const std::filesystem::path& dir);

inline constexpr std::size_t kOracleMaxInstances = 16;

struct OracleEntry {
  SelectionVector selection;
  double raw_loss = 0.0;
  double transformed_loss = 0.0;
};

/// Scores all 2^n selections (n <= 16), in increasing integer order.
std::vector<OracleEntry> enumerate_selections(const Dataset& dataset, const EngineConfig& engine);

/// Fraction of enumerated selections whose transformed loss is strictly
/// below `loss`.
double fraction_better(std::span<const OracleEntry> entries, double loss);

std::string oracle_to_csv(std::span<const OracleEntry> entries);

}  // namespace cleanse
