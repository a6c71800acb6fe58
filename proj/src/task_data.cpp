#include "cleanse/task_data.hpp"

#include <numeric>
#include <unordered_set>

#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"
#include "cleanse/rng.hpp"

namespace cleanse {

namespace {

constexpr std::size_t kShuffleLimitBits = 20;

std::vector<BitVector> sample_distinct_patterns(std::size_t bits, std::size_t count, Rng& rng) {
  std::vector<BitVector> patterns;
  patterns.reserve(count);
  if (bits <= kShuffleLimitBits) {
    std::vector<std::uint64_t> indices(std::size_t{1} << bits);
    std::iota(indices.begin(), indices.end(), std::uint64_t{0});
    // Partial Fisher-Yates: only the first `count` positions are needed.
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t j = i + rng.below(indices.size() - i);
      std::swap(indices[i], indices[j]);
      patterns.push_back(BitVector::from_integer(indices[i], bits));
    }
    return patterns;
  }
  std::unordered_set<BitVector, BitVectorHash> seen;
  while (patterns.size() < count) {
    auto candidate = BitVector::random(bits, rng);
    if (seen.insert(candidate).second) patterns.push_back(std::move(candidate));
  }
  return patterns;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::real: return "real";
    case Provenance::fake: return "fake";
    case Provenance::clean: return "clean";
  }
  return "clean";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "real") return Provenance::real;
  if (text == "fake") return Provenance::fake;
  if (text == "clean") return Provenance::clean;
  throw Error("unknown provenance '" + std::string(text) + "'");
}

int majority_bit(const BitVector& input) {
  if (input.size() % 2 == 0) {
    throw Error("majority_bit: input length " + std::to_string(input.size()) +
                " is even; majority is undefined on ties");
  }
  return input.count() > input.size() / 2 ? 1 : 0;
}

Dataset generate_dataset(std::size_t bits, std::size_t n_real, std::size_t n_valid,
                         std::size_t n_test, std::uint64_t seed) {
  if (bits == 0 || bits % 2 == 0) {
    throw Error("generate_dataset: bit width must be odd, got " + std::to_string(bits));
  }
  const std::size_t needed = n_real + n_valid + n_test;
  if (bits < 63 && needed > (std::size_t{1} << bits)) {
    throw Error("generate_dataset: " + std::to_string(needed) + " distinct patterns requested but only " +
                std::to_string(std::size_t{1} << bits) + " exist at b=" + std::to_string(bits));
  }

  Rng rng(seed);
  const auto patterns = sample_distinct_patterns(bits, needed, rng);

  Dataset ds;
  ds.bits = bits;
  ds.train.reserve(2 * n_real);
  for (std::size_t i = 0; i < n_real; ++i) {
    ds.train.push_back({patterns[i], majority_bit(patterns[i]), Provenance::real});
  }
  for (std::size_t i = 0; i < n_real; ++i) {
    ds.train.push_back({patterns[i], 1 - majority_bit(patterns[i]), Provenance::fake});
  }
  for (std::size_t i = n_real; i < n_real + n_valid; ++i) {
    ds.valid.push_back({patterns[i], majority_bit(patterns[i]), Provenance::clean});
  }
  for (std::size_t i = n_real + n_valid; i < needed; ++i) {
    ds.test.push_back({patterns[i], majority_bit(patterns[i]), Provenance::clean});
  }
  return ds;
}

std::vector<Instance> filter_train(const Dataset& dataset, const SelectionVector& selection) {
  if (selection.size() != dataset.train.size()) {
    throw Error("filter_train: selection has " + std::to_string(selection.size()) +
                " bits but the training set has " + std::to_string(dataset.train.size()) + " instances");
  }
  std::vector<Instance> out;
  out.reserve(selection.count());
  for (std::size_t i = 0; i < selection.size(); ++i) {
    if (selection[i]) out.push_back(dataset.train[i]);
  }
  return out;
}

SelectionVector theoretical_solution(const Dataset& dataset) {
  SelectionVector q(dataset.train.size());
  for (std::size_t i = 0; i < dataset.train.size(); ++i) {
    q.set(i, dataset.train[i].provenance != Provenance::fake);
  }
  return q;
}

std::string dataset_to_csv(const Dataset& dataset) {
  std::string out = "split,index,provenance";
  for (std::size_t c = 0; c < dataset.bits; ++c) out += ",x" + std::to_string(c);
  out += ",label\n";
  auto emit = [&](std::string_view split, const std::vector<Instance>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += split;
      out += ',' + std::to_string(i) + ',';
      out += to_string(items[i].provenance);
      for (std::size_t c = 0; c < dataset.bits; ++c) out += items[i].input[c] ? ",1" : ",0";
      out += ',' + std::to_string(items[i].label) + '\n';
    }
  };
  emit("train", dataset.train);
  emit("valid", dataset.valid);
  emit("test", dataset.test);
  return out;
}

Dataset dataset_from_csv(std::string_view text, const std::string& origin) {
  const auto table = csv::parse(text, origin);
  if (table.header.size() < 5) throw Error(origin + ": too few columns for a dataset file");
  Dataset ds;
  ds.bits = table.header.size() - 4;
  const auto c_split = table.column("split");
  const auto c_index = table.column("index");
  const auto c_prov = table.column("provenance");
  const auto c_label = table.column("label");
  const auto c_x0 = table.column("x0");
  for (const auto& row : table.rows) {
    Instance inst;
    inst.input = BitVector(ds.bits);
    for (std::size_t c = 0; c < ds.bits; ++c) {
      const auto& cell = row[c_x0 + c];
      if (cell != "0" && cell != "1") throw Error(origin + ": input bit must be 0 or 1, got '" + cell + "'");
      inst.input.set(c, cell == "1");
    }
    const auto& label = row[c_label];
    if (label != "0" && label != "1") throw Error(origin + ": label must be 0 or 1, got '" + label + "'");
    inst.label = label == "1" ? 1 : 0;
    inst.provenance = parse_provenance(row[c_prov]);
    std::vector<Instance>* target = nullptr;
    if (row[c_split] == "train") {
      target = &ds.train;
    } else if (row[c_split] == "valid") {
      target = &ds.valid;
    } else if (row[c_split] == "test") {
      target = &ds.test;
    } else {
      throw Error(origin + ": unknown split '" + row[c_split] + "'");
    }
    if (csv::parse_int(row[c_index]) != static_cast<long long>(target->size())) {
      throw Error(origin + ": instance indices must be consecutive within a split");
    }
    target->push_back(std::move(inst));
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  csv::write_text_atomic(path, dataset_to_csv(dataset));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_csv(csv::read_text(path), path.string());
}

}  // namespace cleanse
