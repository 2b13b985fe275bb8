#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fspde/cq_kernel.hpp"
#include "fspde/fem_space.hpp"
#include "fspde/white_noise.hpp"

namespace fspde {

/// Deterministic source term f(x,t): zero, piecewise constant in x (time
/// independent), or an arbitrary callable. The stepper consumes the interval
/// average f_n = (1/tau) int_{t_{n-1}}^{t_n} f dt as a load vector.
class SourceTerm {
 public:
  static SourceTerm zero();
  static SourceTerm piecewise_const_x(std::vector<Scalar> breakpoints,
                                      std::vector<Scalar> values);
  static SourceTerm callable(std::function<Scalar(Scalar, Scalar)> f);

  bool is_zero() const noexcept { return kind_ == Kind::Zero; }
  bool time_independent() const noexcept { return kind_ != Kind::Callable; }

  /// Load vector of f_n for step n (1-based). Piecewise-constant sources are
  /// integrated exactly; callables use 5-point Gauss in time per step.
  Vector average_load(int n, Scalar tau, const Mesh1D& mesh) const;

 private:
  enum class Kind { Zero, PiecewiseConstX, Callable };

  SourceTerm() = default;

  Kind kind_ = Kind::Zero;
  std::vector<Scalar> breakpoints_;
  std::vector<Scalar> values_;
  std::function<Scalar(Scalar, Scalar)> f_;
};

struct SchemeConfig {
  FractionalOrder alpha;
  Mesh1D mesh;
  Scalar tau = 0.0;
  int num_steps = 0;
  Scalar sigma = 0.0;
  SourceTerm source = SourceTerm::zero();
  /// Initial data psi_0 as a function of x; nullptr means zero.
  std::function<Scalar(Scalar)> initial;
};

/// Mutable per-trajectory state. `u` is the working variable of the scheme:
/// psi_n - psi_0 when alpha <= 1, psi_n itself when alpha > 1. The
/// convolution history is kept with the stiffness matrix pre-applied;
/// the column of step j lives at index num_steps - j, so that one
/// contiguous matrix-vector product evaluates the CQ sum.
struct SchemeState {
  int n = 0;
  Vector u;
  Matrix history_stiff;  // dim x num_steps, right-aligned as above

  /// Stiffness-applied history entry of step j (1-based), j <= n.
  Eigen::Ref<const Vector> history_entry(int j) const {
    return history_stiff.col(history_stiff.cols() - j);
  }
};

/// Advances the fully discrete backward-Euler CQ scheme
///   Mass d_tau u_n + tau^{alpha-1} Stiffness sum_{j<=n} b_{n-j} u_j = G_n,
/// where G_n collects the averaged source and the truncated-noise load. The
/// step matrix Mass/tau + tau^{alpha-1} b_0 Stiffness is factorized once and
/// shared by all states; a Stepper is immutable and safe to use from many
/// threads with distinct states.
class Stepper {
 public:
  explicit Stepper(SchemeConfig config);

  const SchemeConfig& config() const noexcept { return config_; }
  int mode_count() const noexcept { return num_modes_; }
  const Vector& psi0() const noexcept { return psi0_; }
  const TriDiagOperator& mass() const noexcept { return mass_; }
  const TriDiagOperator& stiffness() const noexcept { return stiffness_; }
  const TriDiagOperator& step_matrix() const noexcept { return step_matrix_; }
  const CqWeights& weights() const noexcept { return weights_; }
  /// (phi_j, phi_i) pairings, one column per noise mode j = 1..M.
  const Matrix& sine_loads() const noexcept { return sine_loads_; }

  SchemeState initial_state() const;

  /// One deterministic step (no noise).
  void step(SchemeState& state) const;
  /// One step with noise increments dW_j^n for modes j = 1..M.
  void step(SchemeState& state, Eigen::Ref<const Vector> noise_increment) const;

  /// Current solution psi_n of a state.
  NodalVector psi(const SchemeState& state) const;

  /// Runs all N steps from the initial state. A path must carry at least M
  /// mode rows (extra rows are ignored) and exactly N columns at step tau.
  /// If `trajectory` is given it receives psi_0..psi_N.
  NodalVector run(std::vector<NodalVector>* trajectory = nullptr) const;
  NodalVector run(const NoisePath& path,
                  std::vector<NodalVector>* trajectory = nullptr) const;

 private:
  void advance(SchemeState& state,
               const Eigen::Ref<const Vector>* noise_increment) const;
  NodalVector run_impl(const Matrix* increments,
                       std::vector<NodalVector>* trajectory) const;

  SchemeConfig config_;
  int num_modes_;
  TriDiagOperator mass_;
  TriDiagOperator stiffness_;
  Scalar tau_pow_;  // tau^{alpha-1}
  TriDiagOperator step_matrix_;
  TriDiagFactorization factorization_;
  CqWeights weights_;
  Vector psi0_;
  Matrix sine_loads_;
  std::optional<Vector> constant_source_load_;
};

}  // namespace fspde
