// Command-line driver: dataset generation, multi-seed experiments,
// re-analysis of stored traces and brute-force subset search.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"
#include "cleanse/experiment.hpp"

namespace fs = std::filesystem;
using namespace cleanse;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

ExperimentConfig resolve_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig config = path.empty() ? ExperimentConfig{} : load_config(path);
  for (const auto& kv : overrides) apply_setting(config, kv);
  config.validate();
  return config;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    csv::write_text_atomic(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surrogate-guided removal of mislabeled training instances"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string in_dir;
  std::vector<std::string> overrides;

  auto* gen = app.add_subcommand("gen", "Generate the noisy majority-bit dataset as CSV");
  gen->add_option("--config", config_path, "key=value configuration file")->required();
  gen->add_option("--out", out_path, "Output file (default: stdout)");
  gen->add_option("--set", overrides, "Override a configuration key (key=value)");

  auto* run_cmd = app.add_subcommand("run", "Run the experiment for every configured seed");
  run_cmd->add_option("--config", config_path, "key=value configuration file")->required();
  run_cmd->add_option("--out", out_path, "Output directory (default: output_dir from the config)");
  run_cmd->add_option("--set", overrides, "Override a configuration key (key=value)");

  auto* analyze = app.add_subcommand("analyze", "Recompute aggregate CSVs from stored traces");
  analyze->add_option("--in", in_dir, "Directory written by `run`")->required();

  auto* oracle = app.add_subcommand("oracle", "Score every training subset (at most 16 instances)");
  oracle->add_option("--config", config_path, "key=value configuration file")->required();
  oracle->add_option("--out", out_path, "Output file (default: stdout)");
  oracle->add_option("--set", overrides, "Override a configuration key (key=value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      const auto config = resolve_config(config_path, overrides);
      emit(dataset_to_csv(make_dataset(config)), out_path);
    } else if (*run_cmd) {
      auto config = resolve_config(config_path, overrides);
      if (!out_path.empty()) config.output_dir = out_path;
      const auto result = run_experiment(config);
      std::cerr << "wrote " << result.traces.size() << " runs to " << config.output_dir.string() << "\n";
      for (const auto& rs : result.summary.runs) {
        std::cerr << "seed " << rs.seed << ": best raw loss " << rs.best_raw_loss << " at step " << rs.best_step
                  << ", removed " << rs.removed_fake << " fake / " << rs.removed_real << " real, test loss "
                  << rs.loss_test << "\n";
      }
    } else if (*analyze) {
      const auto result = analyze_directory(in_dir);
      std::cerr << "recomputed aggregates for " << result.traces.size() << " runs in " << in_dir << "\n";
    } else if (*oracle) {
      const auto config = resolve_config(config_path, overrides);
      const auto dataset = make_dataset(config);
      const auto entries = enumerate_selections(dataset, config.engine);
      emit(oracle_to_csv(entries), out_path);
      const auto best = std::min_element(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.transformed_loss < b.transformed_loss;
      });
      const auto theoretical = theoretical_solution(dataset);
      const auto& planted = entries[theoretical.words().empty() ? 0 : theoretical.words()[0]];
      std::cerr << "enumerated " << entries.size() << " selections; best " << best->selection.to_hex()
                << " raw loss " << best->raw_loss << "; theoretical solution " << theoretical.to_hex()
                << " raw loss " << planted.raw_loss << " (" << fraction_better(entries, planted.transformed_loss) * 100.0
                << "% better)\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
