#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cleanse/bit_vector.hpp"

namespace cleanse {

/// Number of surrogate coefficients for n binary variables:
/// constant + linear + upper-triangular pairwise terms.
constexpr std::size_t coefficient_count(std::size_t n) { return 1 + n + n * (n - (n > 0 ? 1 : 0)) / 2; }

/// Position of the pair (i, j), i < j, in row-major upper-triangular order
/// (0,1), (0,2), ..., (n-2, n-1).
constexpr std::size_t pair_index(std::size_t i, std::size_t j, std::size_t n) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

/// Quadratic pseudo-Boolean surrogate f(q) = alpha0 + sum_j a_j q_j +
/// sum_{i<j} a_ij q_i q_j.
struct SurrogateCoefficients {
  double alpha0 = 0.0;
  std::vector<double> linear;
  std::vector<double> pairwise;

  static SurrogateCoefficients zero(std::size_t n);
  /// Inverse of to_vector(); the layout is [alpha0, linear..., pairwise...].
  static SurrogateCoefficients from_vector(std::span<const double> values, std::size_t n);

  std::size_t size() const { return linear.size(); }
  std::vector<double> to_vector() const;
};

/// Dense upper-triangular n x n matrix: diagonal holds the linear terms,
/// entries above it the pairwise terms. Entries below the diagonal are
/// always zero.
class QuboMatrix {
 public:
  QuboMatrix() = default;
  explicit QuboMatrix(std::size_t n) : n_(n), entries_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  /// Throws for i > j.
  void set(std::size_t i, std::size_t j, double value);

  /// Largest absolute entry (0 for the empty or zero matrix).
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> entries_;
};

/// Expanded feature vector [1, q_1..q_n, q_1 q_2, .., q_{n-1} q_n].
using ExpandedFeatures = BitVector;

ExpandedFeatures expand(const BitVector& q);

double evaluate(const SurrogateCoefficients& coeffs, const BitVector& q);

/// Constant-shifted QUBO form of the surrogate; alpha0 is dropped.
QuboMatrix to_qubo(const SurrogateCoefficients& coeffs);

double qubo_energy(const QuboMatrix& u, const BitVector& q);

/// Ridge regression of targets on expanded features with the constant
/// term left unpenalized:
///   argmin sum_k (l_k - a . f_k)^2 + lambda * |a without a_0|^2.
/// Solved by QR of the lambda-augmented centered design when samples
/// outnumber the non-constant features, and through the Cholesky-factored
/// kernel system otherwise.
SurrogateCoefficients fit_ridge(std::span<const ExpandedFeatures> features, std::span<const double> targets,
                                double lambda);

/// i,j,value for every nonzero entry on or above the diagonal.
std::string qubo_to_csv(const QuboMatrix& u);

}  // namespace cleanse
