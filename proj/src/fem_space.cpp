#include "fspde/fem_space.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fspde {

namespace {

// 5-point Gauss-Legendre rule on [-1,1].
constexpr int kGaussPoints = 5;
constexpr Scalar kGaussNode[kGaussPoints] = {
    -0.9061798459386640, -0.5384693101056831, 0.0,
    0.5384693101056831, 0.9061798459386640};
constexpr Scalar kGaussWeight[kGaussPoints] = {
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
    0.4786286704993665, 0.2369268850561891};

// Integrals of a constant against the two local shape functions on
// [a,b] inside the element [xl, xl+h]: left hat (xl+h-x)/h, right (x-xl)/h.
void accumulate_const_piece(Scalar value, Scalar a, Scalar b, Scalar xl,
                            Scalar h, Scalar& left, Scalar& right) {
  const Scalar xr = xl + h;
  left += value * ((xr - a) * (xr - a) - (xr - b) * (xr - b)) / (2.0 * h);
  right += value * ((b - xl) * (b - xl) - (a - xl) * (a - xl)) / (2.0 * h);
}

}  // namespace

Mesh1D::Mesh1D(int num_elements_) : num_elements(num_elements_) {
  if (num_elements < 2) {
    throw std::invalid_argument("Mesh1D: need at least 2 elements, got " +
                                std::to_string(num_elements));
  }
}

NodalVector::NodalVector(Mesh1D mesh_, Vector values_)
    : mesh(mesh_), values(std::move(values_)) {
  if (values.size() != mesh.interior_nodes()) {
    throw std::invalid_argument("NodalVector: size does not match mesh");
  }
}

NodalVector NodalVector::zero(Mesh1D mesh) {
  return NodalVector(mesh, Vector::Zero(mesh.interior_nodes()));
}

Vector TriDiagOperator::apply(const Vector& x) const {
  if (x.size() != diag.size()) {
    throw std::invalid_argument("TriDiagOperator::apply: dimension mismatch");
  }
  const Eigen::Index n = diag.size();
  Vector y = diag.cwiseProduct(x);
  if (n > 1) {
    y.head(n - 1) += off.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += off.cwiseProduct(x.head(n - 1));
  }
  return y;
}

TriDiagFactorization::TriDiagFactorization(const TriDiagOperator& a)
    : d_(a.diag.size()), l_(std::max<Eigen::Index>(a.diag.size() - 1, 0)), off_(a.off) {
  const Eigen::Index n = a.diag.size();
  if (a.off.size() != std::max<Eigen::Index>(n - 1, 0)) {
    throw std::invalid_argument("TriDiagFactorization: off-diagonal size mismatch");
  }
  constexpr Scalar kPivotFloor = 1e-300;
  d_[0] = a.diag[0];
  if (std::abs(d_[0]) < kPivotFloor) {
    throw NumericalError("TriDiagFactorization: pivot underflow at row 0");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    l_[i - 1] = a.off[i - 1] / d_[i - 1];
    d_[i] = a.diag[i] - l_[i - 1] * a.off[i - 1];
    if (std::abs(d_[i]) < kPivotFloor) {
      throw NumericalError("TriDiagFactorization: pivot underflow at row " +
                           std::to_string(i));
    }
  }
}

void TriDiagFactorization::solve_in_place(Vector& rhs) const {
  const Eigen::Index n = d_.size();
  if (rhs.size() != n) {
    throw std::invalid_argument("TriDiagFactorization::solve: dimension mismatch");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    rhs[i] -= l_[i - 1] * rhs[i - 1];
  }
  rhs[n - 1] /= d_[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    rhs[i] = (rhs[i] - off_[i] * rhs[i + 1]) / d_[i];
  }
}

Vector TriDiagFactorization::solve(const Vector& rhs) const {
  Vector x = rhs;
  solve_in_place(x);
  return x;
}

TriDiagOperator assemble_mass(const Mesh1D& mesh) {
  const Eigen::Index n = mesh.interior_nodes();
  const Scalar h = mesh.h();
  return TriDiagOperator{Vector::Constant(n, 2.0 * h / 3.0),
                         Vector::Constant(std::max<Eigen::Index>(n - 1, 0), h / 6.0)};
}

TriDiagOperator assemble_stiffness(const Mesh1D& mesh) {
  const Eigen::Index n = mesh.interior_nodes();
  const Scalar h = mesh.h();
  return TriDiagOperator{Vector::Constant(n, 2.0 / h),
                         Vector::Constant(std::max<Eigen::Index>(n - 1, 0), -1.0 / h)};
}

Vector solve_tridiag(const TriDiagOperator& a, const Vector& rhs) {
  return TriDiagFactorization(a).solve(rhs);
}

Vector load_function(const std::function<Scalar(Scalar)>& f, const Mesh1D& mesh) {
  const int m = mesh.num_elements;
  const Scalar h = mesh.h();
  Vector load = Vector::Zero(mesh.interior_nodes());
  for (int e = 0; e < m; ++e) {
    const Scalar xl = mesh.node(e);
    Scalar left = 0.0, right = 0.0;
    for (int q = 0; q < kGaussPoints; ++q) {
      const Scalar x = xl + 0.5 * h * (1.0 + kGaussNode[q]);
      const Scalar w = 0.5 * h * kGaussWeight[q];
      const Scalar fx = f(x);
      const Scalar s = (x - xl) / h;  // right shape function value
      left += w * fx * (1.0 - s);
      right += w * fx * s;
    }
    if (e >= 1) load[e - 1] += left;
    if (e + 1 <= m - 1) load[e] += right;
  }
  return load;
}

Vector load_piecewise_const(const std::vector<Scalar>& breakpoints,
                            const std::vector<Scalar>& values, const Mesh1D& mesh) {
  if (values.size() != breakpoints.size() + 1) {
    throw std::invalid_argument(
        "load_piecewise_const: need one more value than breakpoints");
  }
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("load_piecewise_const: breakpoints must be sorted");
  }
  const int m = mesh.num_elements;
  const Scalar h = mesh.h();
  Vector load = Vector::Zero(mesh.interior_nodes());
  for (int e = 0; e < m; ++e) {
    const Scalar xl = mesh.node(e);
    const Scalar xr = mesh.node(e + 1);
    Scalar left = 0.0, right = 0.0;
    Scalar a = xl;
    for (std::size_t p = 0; p <= breakpoints.size(); ++p) {
      const Scalar piece_end = p < breakpoints.size() ? breakpoints[p] : 1.0;
      const Scalar b = std::min(piece_end, xr);
      if (b > a) {
        accumulate_const_piece(values[p], a, b, xl, h, left, right);
        a = b;
      }
      if (a >= xr) break;
    }
    if (e >= 1) load[e - 1] += left;
    if (e + 1 <= m - 1) load[e] += right;
  }
  return load;
}

Vector load_sine_mode(int j, const Mesh1D& mesh) {
  if (j < 1) {
    throw std::invalid_argument("load_sine_mode: mode index must be >= 1");
  }
  const Scalar h = mesh.h();
  const Scalar w = static_cast<Scalar>(j) * std::numbers::pi_v<Scalar>;
  const Scalar scale = std::numbers::sqrt2_v<Scalar> / (h * w * w);
  const int n = mesh.interior_nodes();
  Vector load(n);
  for (int i = 1; i <= n; ++i) {
    load[i - 1] = scale * (2.0 * std::sin(w * mesh.node(i)) -
                           std::sin(w * mesh.node(i - 1)) -
                           std::sin(w * mesh.node(i + 1)));
  }
  return load;
}

NodalVector l2_project(const std::function<Scalar(Scalar)>& f, const Mesh1D& mesh) {
  const TriDiagOperator mass = assemble_mass(mesh);
  return NodalVector(mesh, solve_tridiag(mass, load_function(f, mesh)));
}

Scalar discrete_l2_norm(const NodalVector& v, const TriDiagOperator& mass) {
  if (v.values.size() != mass.size()) {
    throw std::invalid_argument("discrete_l2_norm: dimension mismatch");
  }
  return std::sqrt(v.values.dot(mass.apply(v.values)));
}

NodalVector prolong(const NodalVector& coarse, const Mesh1D& fine_mesh) {
  if (fine_mesh.num_elements != 2 * coarse.mesh.num_elements) {
    throw std::invalid_argument("prolong: fine mesh must have twice the elements");
  }
  const int nc = coarse.mesh.interior_nodes();
  auto coarse_at = [&](int i) -> Scalar {
    return (i >= 1 && i <= nc) ? coarse.values[i - 1] : 0.0;
  };
  Vector fine(fine_mesh.interior_nodes());
  for (int i = 1; i <= fine_mesh.interior_nodes(); ++i) {
    if (i % 2 == 0) {
      fine[i - 1] = coarse_at(i / 2);
    } else {
      fine[i - 1] = 0.5 * (coarse_at((i - 1) / 2) + coarse_at((i + 1) / 2));
    }
  }
  return NodalVector(fine_mesh, std::move(fine));
}

}  // namespace fspde
