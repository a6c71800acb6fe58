#include "cleanse/surrogate.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cleanse/csv.hpp"
#include "cleanse/error.hpp"

namespace cleanse {

SurrogateCoefficients SurrogateCoefficients::zero(std::size_t n) {
  SurrogateCoefficients c;
  c.linear.assign(n, 0.0);
  c.pairwise.assign(n * (n > 0 ? n - 1 : 0) / 2, 0.0);
  return c;
}

SurrogateCoefficients SurrogateCoefficients::from_vector(std::span<const double> values, std::size_t n) {
  if (values.size() != coefficient_count(n)) {
    throw Error("SurrogateCoefficients: expected " + std::to_string(coefficient_count(n)) +
                " values for n=" + std::to_string(n) + ", got " + std::to_string(values.size()));
  }
  SurrogateCoefficients c;
  c.alpha0 = values[0];
  c.linear.assign(values.begin() + 1, values.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  c.pairwise.assign(values.begin() + 1 + static_cast<std::ptrdiff_t>(n), values.end());
  return c;
}

std::vector<double> SurrogateCoefficients::to_vector() const {
  std::vector<double> out;
  out.reserve(1 + linear.size() + pairwise.size());
  out.push_back(alpha0);
  out.insert(out.end(), linear.begin(), linear.end());
  out.insert(out.end(), pairwise.begin(), pairwise.end());
  return out;
}

void QuboMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_) throw Error("QuboMatrix::set: index out of range");
  if (i > j) throw Error("QuboMatrix::set: entries below the diagonal must stay zero");
  entries_[i * n_ + j] = value;
}

double QuboMatrix::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

bool QuboMatrix::all_finite() const {
  for (double v : entries_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

ExpandedFeatures expand(const BitVector& q) {
  const std::size_t n = q.size();
  ExpandedFeatures f(coefficient_count(n));
  f.set(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (q[j]) f.set(1 + j);
  }
  std::size_t pos = 1 + n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!q[i]) {
      pos += n - i - 1;
      continue;
    }
    for (std::size_t j = i + 1; j < n; ++j, ++pos) {
      if (q[j]) f.set(pos);
    }
  }
  return f;
}

double evaluate(const SurrogateCoefficients& coeffs, const BitVector& q) {
  const std::size_t n = coeffs.size();
  if (q.size() != n || coeffs.pairwise.size() != n * (n > 0 ? n - 1 : 0) / 2) {
    throw Error("evaluate: selection of length " + std::to_string(q.size()) +
                " does not match surrogate of dimension " + std::to_string(n));
  }
  double value = coeffs.alpha0;
  for (std::size_t j = 0; j < n; ++j) {
    if (q[j]) value += coeffs.linear[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!q[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (q[j]) value += coeffs.pairwise[pair_index(i, j, n)];
    }
  }
  return value;
}

QuboMatrix to_qubo(const SurrogateCoefficients& coeffs) {
  const std::size_t n = coeffs.size();
  QuboMatrix u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u.set(i, i, coeffs.linear[i]);
    for (std::size_t j = i + 1; j < n; ++j) u.set(i, j, coeffs.pairwise[pair_index(i, j, n)]);
  }
  return u;
}

double qubo_energy(const QuboMatrix& u, const BitVector& q) {
  const std::size_t n = u.size();
  if (q.size() != n) {
    throw Error("qubo_energy: selection of length " + std::to_string(q.size()) + " does not match " +
                std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!q[i]) continue;
    for (std::size_t j = i; j < n; ++j) {
      if (q[j]) e += u(i, j);
    }
  }
  return e;
}

SurrogateCoefficients fit_ridge(std::span<const ExpandedFeatures> features, std::span<const double> targets,
                                double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("fit_ridge: lambda must be positive and finite");
  if (features.empty()) throw Error("fit_ridge: no samples");
  if (features.size() != targets.size()) {
    throw Error("fit_ridge: " + std::to_string(features.size()) + " feature rows but " +
                std::to_string(targets.size()) + " targets");
  }
  const std::size_t p = features.front().size();
  std::size_t n = 0;
  while (coefficient_count(n) < p) ++n;
  if (coefficient_count(n) != p) throw Error("fit_ridge: feature length " + std::to_string(p) + " is not 1+n+n(n-1)/2");

  const auto k = static_cast<Eigen::Index>(features.size());
  const auto d = static_cast<Eigen::Index>(p - 1);
  Eigen::MatrixXd x(k, d);
  Eigen::VectorXd y(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    const auto& f = features[static_cast<std::size_t>(r)];
    if (f.size() != p) throw Error("fit_ridge: feature rows have inconsistent lengths");
    for (Eigen::Index c = 0; c < d; ++c) x(r, c) = f[static_cast<std::size_t>(c) + 1] ? 1.0 : 0.0;
    y(r) = targets[static_cast<std::size_t>(r)];
    if (!std::isfinite(y(r))) throw Error("fit_ridge: non-finite target at row " + std::to_string(r));
  }

  // An unpenalized intercept decouples after centering.
  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  Eigen::VectorXd beta;
  if (k >= d) {
    Eigen::MatrixXd augmented(k + d, d);
    augmented.topRows(k) = x;
    augmented.bottomRows(d) = std::sqrt(lambda) * Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + d);
    rhs.head(k) = y;
    beta = augmented.householderQr().solve(rhs);
  } else {
    Eigen::MatrixXd kernel = x * x.transpose();
    kernel.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(kernel);
    Eigen::VectorXd dual;
    if (llt.info() == Eigen::Success) {
      dual = llt.solve(y);
    } else {
      dual = kernel.ldlt().solve(y);
    }
    beta = x.transpose() * dual;
  }

  std::vector<double> values(p);
  values[0] = y_mean - x_mean.dot(beta);
  for (Eigen::Index c = 0; c < d; ++c) values[static_cast<std::size_t>(c) + 1] = beta(c);
  for (double v : values) {
    if (!std::isfinite(v)) throw Error("fit_ridge: solution is not finite");
  }
  return SurrogateCoefficients::from_vector(values, n);
}

std::string qubo_to_csv(const QuboMatrix& u) {
  std::string out = "i,j,value\n";
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = i; j < u.size(); ++j) {
      if (u(i, j) != 0.0) out += std::to_string(i) + "," + std::to_string(j) + "," + csv::format_double(u(i, j)) + "\n";
    }
  }
  return out;
}

}  // namespace cleanse
