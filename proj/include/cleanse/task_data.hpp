#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cleanse/bit_vector.hpp"

namespace cleanse {

/// real/fake apply to training instances; validation and test instances
/// are always clean.
enum class Provenance { real, fake, clean };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

struct Instance {
  BitVector input;
  int label = 0;
  Provenance provenance = Provenance::clean;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Noisy majority-bit task. The training list holds n_real correctly
/// labeled instances followed by n_real mislabeled copies of the same
/// inputs.
struct Dataset {
  std::size_t bits = 0;
  std::vector<Instance> train;
  std::vector<Instance> valid;
  std::vector<Instance> test;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Selection masks over Dataset::train; bit i set keeps instance i.
using SelectionVector = BitVector;

/// Majority bit of an odd-length input. Throws on even length.
int majority_bit(const BitVector& input);

/// Samples n_real + n_valid + n_test distinct b-bit patterns without
/// replacement. Deterministic in all arguments.
Dataset generate_dataset(std::size_t bits, std::size_t n_real, std::size_t n_valid,
                         std::size_t n_test, std::uint64_t seed);

std::vector<Instance> filter_train(const Dataset& dataset, const SelectionVector& selection);

/// Keeps exactly the real instances.
SelectionVector theoretical_solution(const Dataset& dataset);

// CSV: split,index,provenance,x0..x{b-1},label; one row per instance.
std::string dataset_to_csv(const Dataset& dataset);
Dataset dataset_from_csv(std::string_view text, const std::string& origin = "dataset");
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

}  // namespace cleanse
