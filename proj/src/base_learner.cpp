#include "cleanse/base_learner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"

namespace cleanse {

namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct Problem {
  Eigen::MatrixXd design;  // m x (b+1), last column is the bias feature
  Eigen::VectorXd targets;
  double l2 = 0.0;
  std::size_t bits = 0;
};

Problem make_problem(std::span<const Instance> instances, std::size_t bits, double l2) {
  Problem p;
  p.bits = bits;
  p.l2 = l2;
  p.design.setZero(static_cast<Eigen::Index>(instances.size()), static_cast<Eigen::Index>(bits + 1));
  p.targets.resize(static_cast<Eigen::Index>(instances.size()));
  for (std::size_t r = 0; r < instances.size(); ++r) {
    const auto& inst = instances[r];
    if (inst.input.size() != bits) {
      throw Error("train: instance " + std::to_string(r) + " has " + std::to_string(inst.input.size()) +
                  " input bits, expected " + std::to_string(bits));
    }
    const auto row = static_cast<Eigen::Index>(r);
    for (std::size_t c = 0; c < bits; ++c) p.design(row, static_cast<Eigen::Index>(c)) = inst.input[c] ? 1.0 : 0.0;
    p.design(row, static_cast<Eigen::Index>(bits)) = 1.0;
    p.targets(row) = inst.label;
  }
  return p;
}

double objective(const Problem& p, const Eigen::VectorXd& theta, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const auto m = p.design.rows();
  const auto d = theta.size();
  const auto b = static_cast<Eigen::Index>(p.bits);
  double value = 0.5 * p.l2 * theta.head(b).squaredNorm();
  if (grad) {
    grad->setZero(d);
    grad->head(b) = p.l2 * theta.head(b);
  }
  if (hess) {
    hess->setZero(d, d);
    for (Eigen::Index i = 0; i < b; ++i) (*hess)(i, i) = p.l2;
  }
  if (m == 0) return value;

  const Eigen::VectorXd z = p.design * theta;
  const double inv_m = 1.0 / static_cast<double>(m);
  double data = 0.0;
  Eigen::VectorXd residual(m);
  Eigen::VectorXd curvature(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    data += softplus(z(r)) - p.targets(r) * z(r);
    const double s = sigmoid(z(r));
    residual(r) = s - p.targets(r);
    curvature(r) = s * (1.0 - s);
  }
  value += data * inv_m;
  if (grad) *grad += inv_m * (p.design.transpose() * residual);
  if (hess) *hess += inv_m * (p.design.transpose() * curvature.asDiagonal() * p.design);
  return value;
}

LogisticModel to_model(const Eigen::VectorXd& theta, std::size_t bits, double l2) {
  LogisticModel model;
  model.weights.assign(theta.data(), theta.data() + bits);
  model.bias = theta(static_cast<Eigen::Index>(bits));
  model.l2_strength = l2;
  return model;
}

}  // namespace

LogisticModel LogisticModel::zero(std::size_t bits, double l2_strength) {
  LogisticModel m;
  m.weights.assign(bits, 0.0);
  m.l2_strength = l2_strength;
  return m;
}

void TrainSettings::validate() const {
  if (!(l2_strength >= 0.0) || !std::isfinite(l2_strength)) {
    throw ConfigError("l2_strength must be a finite non-negative number");
  }
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (!(convergence_tolerance > 0.0)) throw ConfigError("convergence tolerance must be positive");
}

TrainReport train_with_report(std::span<const Instance> instances, std::size_t bits,
                              const TrainSettings& settings) {
  settings.validate();
  const Problem p = make_problem(instances, bits, settings.l2_strength);
  const auto d = static_cast<Eigen::Index>(bits + 1);

  TrainReport report;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  double value = objective(p, theta, &grad, &hess);
  report.objective_history.push_back(value);

  for (std::size_t it = 0; it < settings.max_iterations; ++it) {
    if (grad.norm() <= settings.convergence_tolerance) {
      report.converged = true;
      break;
    }
    Eigen::VectorXd direction;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) direction = -ldlt.solve(grad);
    if (direction.size() != d || !direction.allFinite() || direction.dot(grad) >= 0.0) direction = -grad;

    // Armijo backtracking; a full Newton step is tried first.
    double step = 1.0;
    const double slope = direction.dot(grad);
    Eigen::VectorXd candidate;
    double candidate_value = value;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      candidate = theta + step * direction;
      candidate_value = objective(p, candidate, nullptr, nullptr);
      if (candidate_value <= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable in double precision

    theta = candidate;
    value = objective(p, theta, &grad, &hess);
    report.objective_history.push_back(value);
    report.iterations = it + 1;
  }
  if (!report.converged && grad.norm() <= settings.convergence_tolerance) report.converged = true;
  report.model = to_model(theta, bits, settings.l2_strength);
  return report;
}

LogisticModel train(std::span<const Instance> instances, std::size_t bits, const TrainSettings& settings) {
  return train_with_report(instances, bits, settings).model;
}

double predict_proba(const LogisticModel& model, const BitVector& input) {
  if (input.size() != model.weights.size()) {
    throw Error("predict_proba: input has " + std::to_string(input.size()) + " bits, model expects " +
                std::to_string(model.weights.size()));
  }
  double z = model.bias;
  for (std::size_t c = 0; c < input.size(); ++c) {
    if (input[c]) z += model.weights[c];
  }
  return sigmoid(z);
}

double log_loss(const LogisticModel& model, std::span<const Instance> instances) {
  if (instances.empty()) throw Error("log_loss: empty instance list");
  double total = 0.0;
  for (const auto& inst : instances) {
    const double p = std::clamp(predict_proba(model, inst.input), kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= inst.label == 1 ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(instances.size());
}

double training_objective(const LogisticModel& model, std::span<const Instance> instances,
                          std::vector<double>* gradient) {
  const std::size_t bits = model.weights.size();
  const Problem p = make_problem(instances, bits, model.l2_strength);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(bits + 1));
  for (std::size_t c = 0; c < bits; ++c) theta(static_cast<Eigen::Index>(c)) = model.weights[c];
  theta(static_cast<Eigen::Index>(bits)) = model.bias;
  Eigen::VectorXd grad;
  const double value = objective(p, theta, gradient ? &grad : nullptr, nullptr);
  if (gradient) gradient->assign(grad.data(), grad.data() + grad.size());
  return value;
}

std::string model_to_csv(const LogisticModel& model) {
  std::string out = "parameter,value\n";
  for (std::size_t c = 0; c < model.weights.size(); ++c) {
    out += "w" + std::to_string(c) + "," + csv::format_double(model.weights[c]) + "\n";
  }
  out += "bias," + csv::format_double(model.bias) + "\n";
  return out;
}

}  // namespace cleanse
