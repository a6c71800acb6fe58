#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cleanse/task_data.hpp"

namespace cleanse {

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2_strength = 0.0;

  static LogisticModel zero(std::size_t bits, double l2_strength = 0.0);
};

struct TrainSettings {
  double l2_strength = 1.0;
  std::size_t max_iterations = 200;
  double convergence_tolerance = 1e-8;

  void validate() const;
};

struct TrainReport {
  LogisticModel model;
  /// Objective value at the start and after every accepted iteration.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Minimizes mean log-loss + (l2/2)*|w|^2 with damped Newton steps and a
/// backtracking line search (gradient descent where the Newton direction is
/// not a descent direction). The bias is not penalized. An empty instance
/// list yields the zero model.
TrainReport train_with_report(std::span<const Instance> instances, std::size_t bits,
                              const TrainSettings& settings);
LogisticModel train(std::span<const Instance> instances, std::size_t bits,
                    const TrainSettings& settings);

double predict_proba(const LogisticModel& model, const BitVector& input);

inline constexpr double kProbabilityClamp = 1e-15;

/// Mean binary cross-entropy with predictions clamped to [eps, 1-eps].
/// Throws on an empty instance list.
double log_loss(const LogisticModel& model, std::span<const Instance> instances);

/// Regularized training objective and its gradient. The gradient is laid
/// out as [dw_0 .. dw_{b-1}, d bias].
double training_objective(const LogisticModel& model, std::span<const Instance> instances,
                          std::vector<double>* gradient = nullptr);

/// Parameter dump: parameter,value with rows w0..w{b-1} then bias.
std::string model_to_csv(const LogisticModel& model);

}  // namespace cleanse
