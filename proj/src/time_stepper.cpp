#include "fspde/time_stepper.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace fspde {

namespace {

// 5-point Gauss-Legendre rule on [-1,1], for time averages of callables.
constexpr int kGaussPoints = 5;
constexpr Scalar kGaussNode[kGaussPoints] = {
    -0.9061798459386640, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.9061798459386640};
constexpr Scalar kGaussWeight[kGaussPoints] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

}  // namespace

SourceTerm SourceTerm::zero() { return SourceTerm{}; }

SourceTerm SourceTerm::piecewise_const_x(std::vector<Scalar> breakpoints,
                                         std::vector<Scalar> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument(
        "SourceTerm: need one more value than breakpoints");
  }
  SourceTerm s;
  s.kind_ = Kind::PiecewiseConstX;
  s.breakpoints_ = std::move(breakpoints);
  s.values_ = std::move(values);
  return s;
}

SourceTerm SourceTerm::callable(std::function<Scalar(Scalar, Scalar)> f) {
  SourceTerm s;
  s.kind_ = Kind::Callable;
  s.f_ = std::move(f);
  return s;
}

Vector SourceTerm::average_load(int n, Scalar tau, const Mesh1D& mesh) const {
  switch (kind_) {
    case Kind::Zero:
      return Vector::Zero(mesh.interior_nodes());
    case Kind::PiecewiseConstX:
      return load_piecewise_const(breakpoints_, values_, mesh);
    case Kind::Callable: {
      const Scalar t_prev = (n - 1) * tau;
      Vector load = Vector::Zero(mesh.interior_nodes());
      for (int q = 0; q < kGaussPoints; ++q) {
        const Scalar t = t_prev + 0.5 * tau * (1.0 + kGaussNode[q]);
        load += (0.5 * kGaussWeight[q]) *
                load_function([&](Scalar x) { return f_(x, t); }, mesh);
      }
      return load;
    }
  }
  throw std::logic_error("SourceTerm: unreachable");
}

namespace {

SchemeConfig validated(SchemeConfig cfg) {
  if (!(cfg.tau > 0.0)) {
    throw std::invalid_argument("Stepper: tau must be positive");
  }
  if (cfg.num_steps < 0) {
    throw std::invalid_argument("Stepper: num_steps must be nonnegative");
  }
  if (cfg.sigma < 0.0) {
    throw std::invalid_argument("Stepper: sigma must be nonnegative");
  }
  return cfg;
}

}  // namespace

Stepper::Stepper(SchemeConfig config)
    : config_(validated(std::move(config))),
      num_modes_(fspde::mode_count(config_.mesh.h())),
      mass_(assemble_mass(config_.mesh)),
      stiffness_(assemble_stiffness(config_.mesh)),
      tau_pow_(std::pow(config_.tau, config_.alpha.value() - 1.0)),
      step_matrix_{mass_.diag / config_.tau + tau_pow_ * stiffness_.diag,
                   mass_.off / config_.tau + tau_pow_ * stiffness_.off},
      factorization_(step_matrix_),
      weights_(cq_weights(config_.alpha, config_.num_steps)),
      psi0_(config_.initial
                ? l2_project(config_.initial, config_.mesh).values
                : Vector::Zero(config_.mesh.interior_nodes())),
      sine_loads_(config_.mesh.interior_nodes(), num_modes_) {
  // SPD of the step matrix: all elimination pivots positive.
  if ((factorization_.pivots().array() <= 0.0).any()) {
    throw NumericalError("Stepper: step matrix is not positive definite");
  }
  for (int j = 1; j <= num_modes_; ++j) {
    sine_loads_.col(j - 1) = load_sine_mode(j, config_.mesh);
  }
  if (config_.source.time_independent()) {
    constant_source_load_ =
        config_.source.average_load(1, config_.tau, config_.mesh);
  }
}

SchemeState Stepper::initial_state() const {
  SchemeState state;
  state.n = 0;
  state.u = config_.alpha.branch() == CqBranch::SubtractInitial
                ? Vector::Zero(psi0_.size())
                : psi0_;
  state.history_stiff.resize(psi0_.size(), config_.num_steps);
  return state;
}

void Stepper::step(SchemeState& state) const { advance(state, nullptr); }

void Stepper::step(SchemeState& state,
                   Eigen::Ref<const Vector> noise_increment) const {
  if (noise_increment.size() != num_modes_) {
    throw std::invalid_argument(
        "Stepper::step: noise increment must have length M = " +
        std::to_string(num_modes_));
  }
  advance(state, &noise_increment);
}

void Stepper::advance(SchemeState& state,
                      const Eigen::Ref<const Vector>* noise_increment) const {
  const int n = state.n + 1;
  if (n > config_.num_steps) {
    throw std::invalid_argument("Stepper::step: all N steps already taken");
  }
  Vector rhs = mass_.apply(state.u) / config_.tau;
  if (n >= 2) {
    const Eigen::Index cols = n - 1;
    rhs.noalias() -=
        tau_pow_ *
        (state.history_stiff.middleCols(config_.num_steps - n + 1, cols) *
         weights_.b.segment(1, cols));
  }
  if (constant_source_load_) {
    rhs += *constant_source_load_;
  } else {
    rhs += config_.source.average_load(n, config_.tau, config_.mesh);
  }
  if (noise_increment) {
    rhs.noalias() +=
        (config_.sigma / config_.tau) * (sine_loads_ * (*noise_increment));
  }
  factorization_.solve_in_place(rhs);
  state.u = std::move(rhs);
  state.history_stiff.col(config_.num_steps - n) = stiffness_.apply(state.u);
  state.n = n;
}

NodalVector Stepper::psi(const SchemeState& state) const {
  if (config_.alpha.branch() == CqBranch::SubtractInitial) {
    return NodalVector(config_.mesh, state.u + psi0_);
  }
  return NodalVector(config_.mesh, state.u);
}

NodalVector Stepper::run(std::vector<NodalVector>* trajectory) const {
  return run_impl(nullptr, trajectory);
}

NodalVector Stepper::run(const NoisePath& path,
                         std::vector<NodalVector>* trajectory) const {
  if (path.config.num_modes < num_modes_) {
    throw std::invalid_argument("Stepper::run: path has fewer than M modes");
  }
  if (path.config.num_steps != config_.num_steps) {
    throw std::invalid_argument("Stepper::run: path step count != N");
  }
  if (path.config.tau != config_.tau) {
    throw std::invalid_argument("Stepper::run: path tau != scheme tau");
  }
  return run_impl(&path.increments, trajectory);
}

NodalVector Stepper::run_impl(const Matrix* increments,
                              std::vector<NodalVector>* trajectory) const {
  SchemeState state = initial_state();
  if (trajectory) {
    trajectory->clear();
    trajectory->reserve(config_.num_steps + 1);
    trajectory->push_back(psi(state));
  }
  for (int n = 1; n <= config_.num_steps; ++n) {
    if (increments) {
      step(state, increments->col(n - 1).head(num_modes_));
    } else {
      step(state);
    }
    if (trajectory) {
      trajectory->push_back(psi(state));
    }
  }
  return psi(state);
}

}  // namespace fspde
