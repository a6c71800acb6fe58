#include "cleanse/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cleanse/analysis.hpp"
#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"

namespace cleanse {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    const long long v = csv::parse_int(value);
    if (v < 0) throw ConfigError(key + " must be non-negative");
    return static_cast<std::uint64_t>(v);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

double to_real(const std::string& key, const std::string& value) {
  try {
    return csv::parse_double(value);
  } catch (const Error&) {
    throw ConfigError(key + ": expected a real number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

std::string seeds_to_text(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  std::size_t i = 0;
  while (i < seeds.size()) {
    std::size_t j = i;
    while (j + 1 < seeds.size() && seeds[j + 1] == seeds[j] + 1) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(seeds[i]);
    if (j > i) out += ".." + std::to_string(seeds[j]);
    i = j + 1;
  }
  return out;
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  seeds.resize(32);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{0});
}

void ExperimentConfig::validate() const {
  if (bits == 0 || bits % 2 == 0) throw ConfigError("b must be odd, got " + std::to_string(bits));
  if (bits > 62) throw ConfigError("b must be at most 62");
  const std::size_t needed = n_real + n_valid + n_test;
  if (needed > (std::size_t{1} << bits)) {
    throw ConfigError("n_real + n_valid + n_test = " + std::to_string(needed) + " exceeds the " +
                      std::to_string(std::size_t{1} << bits) + " distinct " + std::to_string(bits) + "-bit patterns");
  }
  if (n_real == 0) throw ConfigError("n_real must be positive");
  if (n_valid == 0) throw ConfigError("n_valid must be positive");
  if (n_test == 0) throw ConfigError("n_test must be positive");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  engine.validate();
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  auto kv = [&](std::string_view key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  kv("b", std::to_string(bits));
  kv("n_real", std::to_string(n_real));
  kv("n_valid", std::to_string(n_valid));
  kv("n_test", std::to_string(n_test));
  kv("dataset_seed", std::to_string(dataset_seed));
  kv("n_init", std::to_string(engine.n_init));
  kv("n_total", std::to_string(engine.n_total));
  kv("num_reads", std::to_string(engine.sampler.num_reads));
  kv("sampler", std::string(to_string(engine.sampler.kind)));
  kv("num_sweeps", std::to_string(engine.sampler.num_sweeps));
  kv("trotter_slices", std::to_string(engine.sampler.trotter_slices));
  kv("gamma_start_scale", csv::format_double(engine.sampler.gamma_start_scale));
  kv("gamma_end", csv::format_double(engine.sampler.gamma_end));
  kv("transform", std::string(to_string(engine.transform)));
  kv("transform_floor", csv::format_double(engine.transform_floor));
  kv("ridge_lambda", csv::format_double(engine.ridge_lambda));
  kv("l2_strength", csv::format_double(engine.learner.l2_strength));
  kv("max_iterations", std::to_string(engine.learner.max_iterations));
  kv("tolerance", csv::format_double(engine.learner.convergence_tolerance));
  kv("record_timing", engine.record_timing ? "true" : "false");
  kv("seeds", seeds_to_text(seeds));
  kv("output_dir", output_dir.string());
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& raw : csv::split(text, ',')) {
    const auto part = trim(raw);
    if (part.empty()) continue;
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(to_u64("seeds", part));
      continue;
    }
    const auto lo = to_u64("seeds", trim(part.substr(0, dots)));
    const auto hi = to_u64("seeds", trim(part.substr(dots + 2)));
    if (hi < lo) throw ConfigError("seeds: empty range '" + part + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ConfigError("seeds: no seeds given");
  return seeds;
}

void apply_setting(ExperimentConfig& c, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  auto& e = c.engine;
  if (key == "b") {
    c.bits = to_u64(key, value);
  } else if (key == "n_real") {
    c.n_real = to_u64(key, value);
  } else if (key == "n_valid") {
    c.n_valid = to_u64(key, value);
  } else if (key == "n_test") {
    c.n_test = to_u64(key, value);
  } else if (key == "dataset_seed") {
    c.dataset_seed = to_u64(key, value);
  } else if (key == "n_init") {
    e.n_init = to_u64(key, value);
  } else if (key == "n_total") {
    e.n_total = to_u64(key, value);
  } else if (key == "num_reads") {
    e.sampler.num_reads = to_u64(key, value);
  } else if (key == "sampler") {
    e.sampler.kind = parse_sampler_kind(value);
  } else if (key == "num_sweeps") {
    e.sampler.num_sweeps = to_u64(key, value);
  } else if (key == "trotter_slices") {
    e.sampler.trotter_slices = to_u64(key, value);
  } else if (key == "gamma_start_scale") {
    e.sampler.gamma_start_scale = to_real(key, value);
  } else if (key == "gamma_end") {
    e.sampler.gamma_end = to_real(key, value);
  } else if (key == "transform") {
    e.transform = parse_loss_transform(value);
  } else if (key == "transform_floor") {
    e.transform_floor = to_real(key, value);
  } else if (key == "ridge_lambda") {
    e.ridge_lambda = to_real(key, value);
  } else if (key == "l2_strength") {
    e.learner.l2_strength = to_real(key, value);
  } else if (key == "max_iterations") {
    e.learner.max_iterations = to_u64(key, value);
  } else if (key == "tolerance") {
    e.learner.convergence_tolerance = to_real(key, value);
  } else if (key == "record_timing") {
    e.record_timing = to_bool(key, value);
  } else if (key == "seeds") {
    c.seeds = parse_seed_list(value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
  ExperimentConfig c;
  std::size_t line_no = 0;
  for (const auto& raw : csv::split(text, '\n')) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      apply_setting(c, line);
    } catch (const ConfigError& err) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": " + err.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = csv::read_text(path);
  } catch (const Error& err) {
    throw ConfigError(err.what());
  }
  return parse_config(text, path.string());
}

Dataset make_dataset(const ExperimentConfig& config) {
  return generate_dataset(config.bits, config.n_real, config.n_valid, config.n_test, config.dataset_seed);
}

AnalysisSummary analyze_runs(const ExperimentConfig& config, const Dataset& dataset, std::span<const RunTrace> traces) {
  if (traces.size() != config.seeds.size()) throw Error("analyze: number of traces does not match the seed list");
  AnalysisSummary summary;
  const auto theoretical = theoretical_solution(dataset);
  const std::size_t n = dataset.train.size();

  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& t = traces[r];
    RunSummary rs;
    rs.run = r;
    rs.seed = config.seeds[r];
    rs.best_raw_loss = t.best().raw_loss;
    rs.best_transformed_loss = t.best().transformed_loss;
    rs.best_step = t.best().step;
    rs.hamming_to_theoretical = hamming_distance(t.best_selection, theoretical);
    for (std::size_t i = 0; i < n; ++i) {
      if (t.best_selection[i]) continue;
      if (dataset.train[i].provenance == Provenance::fake) {
        ++rs.removed_fake;
      } else {
        ++rs.removed_real;
      }
    }
    const auto subset = filter_train(dataset, t.best_selection);
    const auto model = train(subset, dataset.bits, config.engine.learner);
    rs.loss_train_all = log_loss(model, dataset.train);
    rs.loss_train_optimized = subset.empty() ? std::nan("") : log_loss(model, subset);
    rs.loss_valid = log_loss(model, dataset.valid);
    rs.loss_test = log_loss(model, dataset.test);
    summary.runs.push_back(rs);
  }

  const auto removal = removal_probabilities(traces, dataset);
  std::vector<double> fake_deviance;
  std::vector<double> fake_removal;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& inst = dataset.train[i];
    InstanceSummary is;
    is.instance = i;
    is.provenance = inst.provenance;
    is.summed_input = summed_input(inst.input);
    is.deviance = absolute_deviance(inst.input);
    is.entropy = binary_entropy(inst.input);
    is.removal_probability = removal[i];
    summary.instances.push_back(is);
    if (inst.provenance == Provenance::fake) {
      fake_deviance.push_back(is.deviance);
      fake_removal.push_back(is.removal_probability);
    }
  }
  summary.fake_deviance_removal_spearman = spearman(fake_deviance, fake_removal);

  std::vector<double> all_times;
  const std::size_t steps = traces.front().records.size();
  for (std::size_t s = 0; s < steps; ++s) {
    if (traces.front().records[s].phase != Phase::optimize) continue;
    std::vector<double> times;
    for (const auto& t : traces) {
      if (t.records.size() != steps) throw Error("analyze: runs have different step counts");
      times.push_back(t.records[s].sampling_time);
    }
    StepTiming st;
    st.step = traces.front().records[s].step;
    st.mean = mean_of(times);
    st.sem = sample_std(times) / std::sqrt(static_cast<double>(times.size()));
    st.lower95 = st.mean - 1.96 * st.sem;
    st.upper95 = st.mean + 1.96 * st.sem;
    summary.timing.push_back(st);
    all_times.insert(all_times.end(), times.begin(), times.end());
  }
  summary.sampling_time_mean = mean_of(all_times);
  summary.sampling_time_std = sample_std(all_times);
  return summary;
}

void write_aggregates(const fs::path& dir, const ExperimentConfig& config, const AnalysisSummary& summary,
                      std::span<const RunTrace> traces) {
  using csv::format_double;
  std::string removal = "run,seed,instance,provenance,selected\n";
  std::string losses = "run,seed,split,log_loss\n";
  std::string solutions =
      "run,seed,best_step,best_raw_loss,best_transformed_loss,hamming_distance,removed_real,removed_fake\n";
  std::string energies = "run,seed,step,mean,std\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const auto& rs = summary.runs[r];
    const std::string prefix = std::to_string(r) + "," + std::to_string(rs.seed) + ",";
    for (std::size_t i = 0; i < traces[r].best_selection.size(); ++i) {
      removal += prefix + std::to_string(i) + "," + std::string(to_string(summary.instances[i].provenance)) + "," +
                 (traces[r].best_selection[i] ? "1" : "0") + "\n";
    }
    losses += prefix + "train_all," + format_double(rs.loss_train_all) + "\n";
    losses += prefix + "train_optimized," + format_double(rs.loss_train_optimized) + "\n";
    losses += prefix + "valid," + format_double(rs.loss_valid) + "\n";
    losses += prefix + "test," + format_double(rs.loss_test) + "\n";
    solutions += prefix + std::to_string(rs.best_step) + "," + format_double(rs.best_raw_loss) + "," +
                 format_double(rs.best_transformed_loss) + "," + std::to_string(rs.hamming_to_theoretical) + "," +
                 std::to_string(rs.removed_real) + "," + std::to_string(rs.removed_fake) + "\n";
    for (const auto& rec : traces[r].records) {
      if (!rec.batch_energy_mean) continue;
      energies += prefix + std::to_string(rec.step) + "," + format_double(*rec.batch_energy_mean) + "," +
                  format_double(rec.batch_energy_std.value_or(0.0)) + "\n";
    }
  }

  std::string instances = "instance,provenance,summed_input,deviance,entropy,removal_probability\n";
  for (const auto& is : summary.instances) {
    instances += std::to_string(is.instance) + "," + std::string(to_string(is.provenance)) + "," +
                 std::to_string(is.summed_input) + "," + format_double(is.deviance) + "," +
                 format_double(is.entropy) + "," + format_double(is.removal_probability) + "\n";
  }

  std::string timing = "step,mean_s,sem_s,lower95_s,upper95_s\n";
  for (const auto& st : summary.timing) {
    timing += std::to_string(st.step) + "," + format_double(st.mean) + "," + format_double(st.sem) + "," +
              format_double(st.lower95) + "," + format_double(st.upper95) + "\n";
  }

  std::vector<double> test_losses;
  for (const auto& rs : summary.runs) test_losses.push_back(rs.loss_test);
  std::string overview = "key,value\n";
  overview += "sampler," + std::string(to_string(config.engine.sampler.kind)) + "\n";
  overview += "runs," + std::to_string(summary.runs.size()) + "\n";
  overview += "sampling_time_mean_s," + format_double(summary.sampling_time_mean) + "\n";
  overview += "sampling_time_std_s," + format_double(summary.sampling_time_std) + "\n";
  overview += "mean_test_log_loss," + format_double(mean_of(test_losses)) + "\n";
  overview += "fake_deviance_removal_spearman," + format_double(summary.fake_deviance_removal_spearman) + "\n";

  csv::write_text_atomic(dir / "removal.csv", removal);
  csv::write_text_atomic(dir / "losses.csv", losses);
  csv::write_text_atomic(dir / "instances.csv", instances);
  csv::write_text_atomic(dir / "solutions.csv", solutions);
  csv::write_text_atomic(dir / "energies.csv", energies);
  csv::write_text_atomic(dir / "timing.csv", timing);
  csv::write_text_atomic(dir / "summary.csv", overview);
}

fs::path run_directory(const fs::path& root, std::uint64_t seed) {
  return root / "runs" / ("seed_" + std::to_string(seed));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.dataset = make_dataset(config);
  const fs::path& out = config.output_dir;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory '" + out.string() + "': " + ec.message());
  csv::write_text_atomic(out / "experiment.cfg", config.to_text());
  write_dataset(result.dataset, out / "dataset.csv");

  for (auto seed : config.seeds) {
    EngineConfig engine = config.engine;
    engine.seed = seed;
    RunTrace trace;
    try {
      trace = run(result.dataset, engine);
    } catch (const std::exception& err) {
      throw Error("run with seed " + std::to_string(seed) + " failed: " + err.what());
    }
    const auto dir = run_directory(out, seed);
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create run directory '" + dir.string() + "': " + ec.message());
    csv::write_text_atomic(dir / "trace.csv", trace_to_csv(trace));
    csv::write_text_atomic(dir / "run.meta", run_metadata(engine, result.dataset.train.size()));
    result.traces.push_back(std::move(trace));
  }

  result.summary = analyze_runs(config, result.dataset, result.traces);
  write_aggregates(out, config, result.summary, result.traces);
  return result;
}

ExperimentResult analyze_directory(const fs::path& dir) {
  auto config = load_config(dir / "experiment.cfg");
  config.output_dir = dir;
  config.validate();
  ExperimentResult result;
  result.dataset = read_dataset(dir / "dataset.csv");
  for (auto seed : config.seeds) {
    const auto path = run_directory(dir, seed) / "trace.csv";
    result.traces.push_back(trace_from_csv(csv::read_text(path), result.dataset.train.size(), path.string()));
  }
  result.summary = analyze_runs(config, result.dataset, result.traces);
  write_aggregates(dir, config, result.summary, result.traces);
  return result;
}

std::vector<OracleEntry> enumerate_selections(const Dataset& dataset, const EngineConfig& engine) {
  const std::size_t n = dataset.train.size();
  if (n > kOracleMaxInstances) {
    throw Error("oracle: exhaustive search supports at most " + std::to_string(kOracleMaxInstances) +
                " training instances, got " + std::to_string(n));
  }
  std::vector<OracleEntry> entries;
  entries.reserve(std::size_t{1} << n);
  for (std::uint64_t index = 0; index < (std::uint64_t{1} << n); ++index) {
    OracleEntry e;
    e.selection = BitVector::from_integer(index, n);
    e.raw_loss = evaluate_selection(e.selection, dataset, engine.learner);
    e.transformed_loss = transform_loss(e.raw_loss, engine.transform, engine.transform_floor);
    entries.push_back(std::move(e));
  }
  return entries;
}

double fraction_better(std::span<const OracleEntry> entries, double loss) {
  if (entries.empty()) return 0.0;
  const auto better = std::count_if(entries.begin(), entries.end(),
                                    [&](const OracleEntry& e) { return e.transformed_loss < loss; });
  return static_cast<double>(better) / static_cast<double>(entries.size());
}

std::string oracle_to_csv(std::span<const OracleEntry> entries) {
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return entries[a].transformed_loss < entries[b].transformed_loss;
  });
  std::string out = "rank,selection_hex,raw_loss,transformed_loss\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& e = entries[order[r]];
    out += std::to_string(r + 1) + "," + e.selection.to_hex() + "," + csv::format_double(e.raw_loss) + "," +
           csv::format_double(e.transformed_loss) + "\n";
  }
  return out;
}

}  // namespace cleanse
