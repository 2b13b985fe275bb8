#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fspde::oracle {

namespace {

constexpr Scalar kGauss5Node[] = {-0.9061798459386640, -0.5384693101056831,
                                  0.0, 0.5384693101056831, 0.9061798459386640};
constexpr Scalar kGauss5Weight[] = {0.2369268850561891, 0.4786286704993665,
                                    0.5688888888888889, 0.4786286704993665,
                                    0.2369268850561891};
constexpr Scalar kGauss9Node[] = {
    -0.9681602395076261, -0.8360311073266358, -0.6133714327005904,
    -0.3242534234038089, 0.0,
    0.3242534234038089,  0.6133714327005904,  0.8360311073266358,
    0.9681602395076261};
constexpr Scalar kGauss9Weight[] = {
    0.0812743883615744, 0.1806481606948574, 0.2606106964029354,
    0.3123470770400029, 0.3302393550012598, 0.3123470770400029,
    0.2606106964029354, 0.1806481606948574, 0.0812743883615744};

void check_dimension(Eigen::Index n) {
  if (n > kMaxDimension) {
    throw std::invalid_argument("oracle: dimension cap " +
                                std::to_string(kMaxDimension) + " exceeded");
  }
}

void check_steps(int n) {
  if (n > kMaxSteps) {
    throw std::invalid_argument("oracle: step cap " +
                                std::to_string(kMaxSteps) + " exceeded");
  }
}

/// Lower-triangular Cholesky factor of an SPD matrix.
DenseMatrix cholesky(const DenseMatrix& m) {
  const Eigen::Index n = m.rows();
  DenseMatrix l = DenseMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      Scalar sum = m(i, j);
      for (Eigen::Index k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(sum > 0.0)) {
          throw std::invalid_argument("generalized_eig: M is not SPD");
        }
        l(i, i) = std::sqrt(sum);
      } else {
        l(i, j) = sum / l(j, j);
      }
    }
  }
  return l;
}

Scalar offdiag_frobenius(const DenseMatrix& c) {
  Scalar sum = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (i != j) sum += c(i, j) * c(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

Scalar binom_weight(FractionalOrder alpha, Eigen::Index j) {
  if (j < 0) {
    throw std::invalid_argument("binom_weight: j must be nonnegative");
  }
  const Scalar beta = 1.0 - alpha.value();
  Scalar value = 1.0;
  for (Eigen::Index k = 1; k <= j; ++k) {
    value *= -(beta - static_cast<Scalar>(k) + 1.0) / static_cast<Scalar>(k);
  }
  return value;
}

Scalar quadrature(const std::function<Scalar(Scalar)>& f, Scalar a, Scalar b,
                  int order) {
  if (!(a < b)) {
    throw std::invalid_argument("quadrature: need a < b");
  }
  const Scalar* nodes;
  const Scalar* weights;
  int points;
  if (order == 5) {
    nodes = kGauss5Node;
    weights = kGauss5Weight;
    points = 5;
  } else if (order == 9) {
    nodes = kGauss9Node;
    weights = kGauss9Weight;
    points = 9;
  } else {
    throw std::invalid_argument("quadrature: order must be 5 or 9");
  }
  const Scalar mid = 0.5 * (a + b);
  const Scalar half = 0.5 * (b - a);
  Scalar sum = 0.0;
  for (int q = 0; q < points; ++q) {
    sum += weights[q] * f(mid + half * nodes[q]);
  }
  return half * sum;
}

Vector dense_solve(DenseMatrix a, Vector rhs) {
  const Eigen::Index n = a.rows();
  check_dimension(n);
  if (a.cols() != n || rhs.size() != n) {
    throw std::invalid_argument("dense_solve: dimension mismatch");
  }
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (a(pivot, col) == 0.0) {
      throw NumericalError("dense_solve: singular matrix");
    }
    if (pivot != col) {
      a.row(pivot).swap(a.row(col));
      std::swap(rhs[pivot], rhs[col]);
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar factor = a(r, col) / a(col, col);
      a.row(r).tail(n - col) -= factor * a.row(col).tail(n - col);
      rhs[r] -= factor * rhs[col];
    }
  }
  Vector x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    Scalar sum = rhs[r];
    for (Eigen::Index c = r + 1; c < n; ++c) sum -= a(r, c) * x[c];
    x[r] = sum / a(r, r);
  }
  return x;
}

DenseMatrix dense_mass(const Mesh1D& mesh) {
  const int n = mesh.interior_nodes();
  check_dimension(n);
  const Scalar h = mesh.h();
  DenseMatrix m = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 2.0 * h / 3.0;
    if (i + 1 < n) {
      m(i, i + 1) = h / 6.0;
      m(i + 1, i) = h / 6.0;
    }
  }
  return m;
}

DenseMatrix dense_stiffness(const Mesh1D& mesh) {
  const int n = mesh.interior_nodes();
  check_dimension(n);
  const Scalar h = mesh.h();
  DenseMatrix s = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s(i, i) = 2.0 / h;
    if (i + 1 < n) {
      s(i, i + 1) = -1.0 / h;
      s(i + 1, i) = -1.0 / h;
    }
  }
  return s;
}

GeneralizedEig generalized_eig(const DenseMatrix& s, const DenseMatrix& m) {
  const Eigen::Index n = s.rows();
  check_dimension(n);
  if (s.cols() != n || m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("generalized_eig: dimension mismatch");
  }
  const DenseMatrix l = cholesky(m);

  // C = L^{-1} S L^{-T}: forward-substitute on rows, then on columns.
  DenseMatrix c = s;
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar sum = c(i, col);
      for (Eigen::Index k = 0; k < i; ++k) sum -= l(i, k) * c(k, col);
      c(i, col) = sum / l(i, i);
    }
  }
  c.transposeInPlace();
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar sum = c(i, col);
      for (Eigen::Index k = 0; k < i; ++k) sum -= l(i, k) * c(k, col);
      c(i, col) = sum / l(i, i);
    }
  }
  c = 0.5 * (c + c.transpose()).eval();  // re-symmetrize roundoff

  // Cyclic Jacobi on the unit-scaled matrix.
  const Scalar scale = std::max(c.norm(), Scalar{1e-300});
  c /= scale;
  DenseMatrix q = DenseMatrix::Identity(n, n);
  constexpr Scalar kOffTol = 1e-12;
  for (int sweep = 0; sweep < 100 && offdiag_frobenius(c) >= kOffTol; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index r = p + 1; r < n; ++r) {
        if (c(p, r) == 0.0) continue;
        const Scalar theta = (c(r, r) - c(p, p)) / (2.0 * c(p, r));
        const Scalar t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const Scalar cos_r = 1.0 / std::sqrt(t * t + 1.0);
        const Scalar sin_r = t * cos_r;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar ckp = c(k, p);
          const Scalar ckr = c(k, r);
          c(k, p) = cos_r * ckp - sin_r * ckr;
          c(k, r) = sin_r * ckp + cos_r * ckr;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar cpk = c(p, k);
          const Scalar crk = c(r, k);
          c(p, k) = cos_r * cpk - sin_r * crk;
          c(r, k) = sin_r * cpk + cos_r * crk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar qkp = q(k, p);
          const Scalar qkr = q(k, r);
          q(k, p) = cos_r * qkp - sin_r * qkr;
          q(k, r) = sin_r * qkp + cos_r * qkr;
        }
      }
    }
  }
  if (offdiag_frobenius(c) >= kOffTol) {
    throw NumericalError("generalized_eig: Jacobi did not converge");
  }

  // Back-transform V = L^{-T} Q and sort ascending.
  DenseMatrix v = q;
  for (Eigen::Index col = 0; col < n; ++col) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      Scalar sum = v(i, col);
      for (Eigen::Index k = i + 1; k < n; ++k) sum -= l(k, i) * v(k, col);
      v(i, col) = sum / l(i, i);
    }
  }
  std::vector<Eigen::Index> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](Eigen::Index a, Eigen::Index b) {
    return c(a, a) < c(b, b);
  });
  GeneralizedEig out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues[i] = scale * c(perm[i], perm[i]);
    out.eigenvectors.col(i) = v.col(perm[i]);
  }
  return out;
}

std::vector<Scalar> scalar_cq_recurrence(FractionalOrder alpha, Scalar lambda,
                                         Scalar tau, int num_steps, Scalar c0,
                                         const std::vector<Scalar>& forcing) {
  if (!(lambda > 0.0) || !(tau > 0.0)) {
    throw std::invalid_argument("scalar_cq_recurrence: need lambda, tau > 0");
  }
  check_steps(num_steps);
  if (forcing.size() != static_cast<std::size_t>(num_steps)) {
    throw std::invalid_argument("scalar_cq_recurrence: forcing size != N");
  }
  std::vector<Scalar> b(num_steps + 1);
  for (int j = 0; j <= num_steps; ++j) b[j] = binom_weight(alpha, j);

  const bool subtract = alpha.branch() == CqBranch::SubtractInitial;
  const Scalar cq_scale = std::pow(tau, alpha.value() - 1.0);
  const Scalar denom = 1.0 / tau + cq_scale * lambda * b[0];

  std::vector<Scalar> y(num_steps + 1);
  y[0] = subtract ? 0.0 : c0;
  for (int n = 1; n <= num_steps; ++n) {
    Scalar history = 0.0;
    for (int j = 1; j <= n - 1; ++j) history += b[n - j] * y[j];
    y[n] = (y[n - 1] / tau - cq_scale * lambda * history + forcing[n - 1]) / denom;
  }
  if (subtract) {
    for (int n = 0; n <= num_steps; ++n) y[n] += c0;
  }
  return y;
}

std::vector<Vector> heat_backward_euler(const Mesh1D& mesh, Scalar tau,
                                        int num_steps, const Vector& psi0,
                                        const std::vector<Vector>* loads) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("heat_backward_euler: tau must be positive");
  }
  check_steps(num_steps);
  const int n = mesh.interior_nodes();
  check_dimension(n);
  if (psi0.size() != n) {
    throw std::invalid_argument("heat_backward_euler: psi0 size mismatch");
  }
  if (loads && loads->size() != static_cast<std::size_t>(num_steps)) {
    throw std::invalid_argument("heat_backward_euler: need one load per step");
  }
  const DenseMatrix mass = dense_mass(mesh);
  const DenseMatrix system = mass / tau + dense_stiffness(mesh);
  std::vector<Vector> trajectory;
  trajectory.reserve(num_steps + 1);
  trajectory.push_back(psi0);
  for (int step = 1; step <= num_steps; ++step) {
    Vector rhs = mass * trajectory.back() / tau;
    if (loads) rhs += (*loads)[step - 1];
    trajectory.push_back(dense_solve(system, rhs));
  }
  return trajectory;
}

}  // namespace fspde::oracle
