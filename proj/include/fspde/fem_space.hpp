#pragma once

#include <functional>
#include <vector>

#include "fspde/types.hpp"

namespace fspde {

/// Uniform mesh of (0,1) with nodes x_i = i*h, i = 0..num_elements, and
/// homogeneous Dirichlet conditions at x = 0 and x = 1. Only the interior
/// nodes carry degrees of freedom.
struct Mesh1D {
  explicit Mesh1D(int num_elements_);

  int num_elements;

  Scalar h() const noexcept { return 1.0 / num_elements; }
  int interior_nodes() const noexcept { return num_elements - 1; }
  Scalar node(int i) const noexcept { return static_cast<Scalar>(i) * h(); }

  friend bool operator==(const Mesh1D& a, const Mesh1D& b) {
    return a.num_elements == b.num_elements;
  }
};

/// Coefficients of a piecewise-linear function on a mesh, one value per
/// interior node (boundary values are identically zero).
struct NodalVector {
  NodalVector(Mesh1D mesh_, Vector values_);
  static NodalVector zero(Mesh1D mesh);

  Mesh1D mesh;
  Vector values;
};

/// Symmetric tridiagonal operator; only the diagonal and one off-diagonal
/// band are stored.
struct TriDiagOperator {
  Vector diag;
  Vector off;

  Eigen::Index size() const noexcept { return diag.size(); }
  Vector apply(const Vector& x) const;
};

/// Thomas (LU, no pivoting) factorization of a tridiagonal operator, valid
/// for the diagonally dominant systems arising here. Reusable across solves.
class TriDiagFactorization {
 public:
  explicit TriDiagFactorization(const TriDiagOperator& a);

  void solve_in_place(Vector& rhs) const;
  Vector solve(const Vector& rhs) const;
  Eigen::Index size() const noexcept { return d_.size(); }
  /// Elimination pivots; all positive exactly when the operator is SPD.
  const Vector& pivots() const noexcept { return d_; }

 private:
  Vector d_;  // pivots after elimination
  Vector l_;  // subdiagonal multipliers
  Vector off_;
};

/// Mass matrix of the P1 hat basis: diag 2h/3, off-diagonals h/6.
TriDiagOperator assemble_mass(const Mesh1D& mesh);

/// Stiffness matrix of the P1 hat basis: diag 2/h, off-diagonals -1/h.
TriDiagOperator assemble_stiffness(const Mesh1D& mesh);

/// One-shot tridiagonal solve (factorize + substitute).
Vector solve_tridiag(const TriDiagOperator& a, const Vector& rhs);

/// Load vector (f, phi_i) for all interior hats, per-element 5-point
/// Gauss-Legendre quadrature.
Vector load_function(const std::function<Scalar(Scalar)>& f, const Mesh1D& mesh);

/// Load vector of a function that is constant between consecutive
/// breakpoints, integrated exactly (elements are split at breakpoints).
/// values[p] applies on (breaks[p-1], breaks[p]] with breaks extended by
/// the interval ends 0 and 1.
Vector load_piecewise_const(const std::vector<Scalar>& breakpoints,
                            const std::vector<Scalar>& values, const Mesh1D& mesh);

/// Load vector of the Dirichlet eigenfunction sqrt(2) sin(j pi x) against all
/// interior hats, by the closed form
///   sqrt(2) (2 sin(j pi x_i) - sin(j pi x_{i-1}) - sin(j pi x_{i+1})) / (h (j pi)^2).
Vector load_sine_mode(int j, const Mesh1D& mesh);

/// L2 projection onto the mesh: solves Mass c = load(f).
NodalVector l2_project(const std::function<Scalar(Scalar)>& f, const Mesh1D& mesh);

/// sqrt(v' Mass v), the L2 norm of the piecewise-linear function v.
Scalar discrete_l2_norm(const NodalVector& v, const TriDiagOperator& mass);

/// Exact embedding of a coarse piecewise-linear function into the space on
/// the mesh with twice the elements: shared nodes copy, new midpoints average
/// their neighbours (boundary values are zero).
NodalVector prolong(const NodalVector& coarse, const Mesh1D& fine_mesh);

}  // namespace fspde
