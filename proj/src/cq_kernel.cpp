#include "fspde/cq_kernel.hpp"

#include <cmath>
#include <string>

namespace fspde {

FractionalOrder::FractionalOrder(Scalar alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !(alpha < 2.0)) {
    throw std::invalid_argument("FractionalOrder: alpha must lie in (0,2), got " +
                                std::to_string(alpha));
  }
}

CqWeights cq_weights(FractionalOrder alpha, Eigen::Index n, Eigen::Index max_n) {
  if (n < 0) {
    throw std::invalid_argument("cq_weights: n must be nonnegative");
  }
  if (n > max_n) {
    throw std::invalid_argument("cq_weights: n exceeds the configured maximum of " +
                                std::to_string(max_n));
  }
  Vector b(n + 1);
  b[0] = 1.0;
  const Scalar a = alpha.value();
  for (Eigen::Index j = 1; j <= n; ++j) {
    b[j] = b[j - 1] * (static_cast<Scalar>(j) - 2.0 + a) / static_cast<Scalar>(j);
  }
  return CqWeights{alpha, std::move(b)};
}

Vector fractional_convolve(const CqWeights& weights,
                           std::span<const Vector> history, Scalar tau) {
  if (history.empty()) {
    throw std::invalid_argument("fractional_convolve: empty history");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("fractional_convolve: tau must be positive");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(history.size());
  if (weights.count() < n) {
    throw std::invalid_argument("fractional_convolve: need at least n weights");
  }
  const Eigen::Index dim = history[0].size();
  Vector acc = Vector::Zero(dim);
  for (Eigen::Index j = 1; j <= n; ++j) {
    const Vector& v = history[static_cast<std::size_t>(j - 1)];
    if (v.size() != dim) {
      throw std::invalid_argument("fractional_convolve: history length mismatch");
    }
    acc += weights.b[n - j] * v;
  }
  return std::pow(tau, weights.alpha.value() - 1.0) * acc;
}

Vector backward_difference(const Vector& v_n, const Vector& v_prev, Scalar tau) {
  if (v_n.size() != v_prev.size()) {
    throw std::invalid_argument("backward_difference: length mismatch");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("backward_difference: tau must be positive");
  }
  return (v_n - v_prev) / tau;
}

}  // namespace fspde
