#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cleanse/bbo_engine.hpp"
#include "cleanse/bit_vector.hpp"
#include "cleanse/task_data.hpp"

namespace cleanse {

/// Number of ones in the input pattern.
std::size_t summed_input(const BitVector& input);

/// |popcount - b/2|: distance from the majority threshold (4.5 at b=9).
double absolute_deviance(const BitVector& input);

/// Binary entropy (natural log) of the fraction of ones, 0 log 0 = 0.
double binary_entropy(const BitVector& input);

/// Per training instance, the fraction of runs whose best selection drops it.
std::vector<double> removal_probabilities(std::span<const RunTrace> traces, const Dataset& dataset);

/// Spearman rank correlation with average ranks for ties. Returns 0 when
/// either side is constant.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace cleanse
