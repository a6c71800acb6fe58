#include "cleanse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cleanse/error.hpp"

namespace cleanse {

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::size_t summed_input(const BitVector& input) { return input.count(); }

double absolute_deviance(const BitVector& input) {
  return std::abs(static_cast<double>(input.count()) - 0.5 * static_cast<double>(input.size()));
}

double binary_entropy(const BitVector& input) {
  if (input.empty()) return 0.0;
  const double p = static_cast<double>(input.count()) / static_cast<double>(input.size());
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

std::vector<double> removal_probabilities(std::span<const RunTrace> traces, const Dataset& dataset) {
  if (traces.empty()) throw Error("removal_probabilities: no runs given");
  const std::size_t n = dataset.train.size();
  std::vector<double> removed(n, 0.0);
  for (const auto& t : traces) {
    if (t.best_selection.size() != n) throw Error("removal_probabilities: run selection length does not match dataset");
    for (std::size_t i = 0; i < n; ++i) {
      if (!t.best_selection[i]) removed[i] += 1.0;
    }
  }
  for (auto& r : removed) r /= static_cast<double>(traces.size());
  return removed;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("spearman: length mismatch");
  if (a.size() < 2) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace cleanse
