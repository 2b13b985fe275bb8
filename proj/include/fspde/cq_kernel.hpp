#pragma once

#include <span>

#include "fspde/types.hpp"

namespace fspde {

/// Which form of the discrete fractional derivative applies: for alpha <= 1
/// the convolution acts on u_j - u_0, for alpha in (1,2) on u_j itself.
enum class CqBranch { SubtractInitial, PlainHistory };

/// Fractional order alpha in the open interval (0,2).
class FractionalOrder {
 public:
  explicit FractionalOrder(Scalar alpha);

  Scalar value() const noexcept { return alpha_; }

  CqBranch branch() const noexcept {
    return alpha_ <= 1.0 ? CqBranch::SubtractInitial : CqBranch::PlainHistory;
  }

 private:
  Scalar alpha_;
};

/// Coefficients b_0..b_n of the power series (1-z)^{1-alpha}, the weights of
/// the backward-Euler convolution quadrature.
struct CqWeights {
  FractionalOrder alpha;
  Vector b;

  Eigen::Index count() const noexcept { return b.size(); }
};

/// Upper bound on the number of weights generated in one call.
inline constexpr Eigen::Index kMaxCqWeightCount = Eigen::Index{1} << 24;

/// Generates b_0..b_n via the two-term recurrence
///   b_0 = 1,  b_j = b_{j-1} * (j - 2 + alpha) / j.
CqWeights cq_weights(FractionalOrder alpha, Eigen::Index n,
                     Eigen::Index max_n = kMaxCqWeightCount);

/// Discrete fractional convolution tau^{alpha-1} * sum_{j=1}^{n} b_{n-j} v_j
/// over a history v_1..v_n of equal-length vectors.
Vector fractional_convolve(const CqWeights& weights,
                           std::span<const Vector> history, Scalar tau);

/// Backward difference (v_n - v_prev) / tau.
Vector backward_difference(const Vector& v_n, const Vector& v_prev,
                           Scalar tau);

}  // namespace fspde
