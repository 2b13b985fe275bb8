#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace fspde {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when a solve or a statistic turns out non-finite or a pivot
/// collapses; the CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersion = "0.1.0";

}  // namespace fspde
