#pragma once

// Small dense helpers for nonnegative and stochastic matrices. Everything is
// templated on the Eigen expression type so callers can pass blocks, maps or
// long double matrices without copies.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

#include "thermo/errors.hpp"

namespace thermo::linalg {

// Strong connectivity of the support graph of a square matrix.
template <typename Derived>
bool is_irreducible(const Eigen::MatrixBase<Derived> &m) {
  const Eigen::Index n = m.rows();
  if (n != m.cols() || n == 0) return false;
  // Boolean closure by repeated squaring of (I + support).
  Eigen::MatrixXi reach = Eigen::MatrixXi::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (m(i, j) != typename Derived::Scalar(0)) reach(i, j) = 1;
  for (Eigen::Index span = 1; span < n; span *= 2) {
    Eigen::MatrixXi next = reach * reach;
    reach = (next.array() > 0).template cast<int>();
  }
  return (reach.array() > 0).all();
}

template <typename Scalar>
struct PerronResult {
  Scalar spectral_radius;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> right_vector;
  std::size_t iterations;
};

// Perron root of a nonnegative irreducible matrix by power iteration on
// (I + M), which is primitive even when M is periodic.
template <typename Derived>
PerronResult<typename Derived::Scalar> perron_root(
    const Eigen::MatrixBase<Derived> &m,
    typename Derived::Scalar tolerance = typename Derived::Scalar(1e-12),
    std::size_t max_iterations = 200000) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = m.rows();
  if (!is_irreducible(m)) throw NumericalError("oracle undefined: matrix is reducible");
  if ((m.array() < Scalar(0)).any()) throw ValidationError("perron_root: negative entry");

  // Rescale so the shifted iteration is well conditioned regardless of the
  // magnitude of the entries.
  const Scalar scale = m.cwiseAbs().maxCoeff();
  const auto shifted = (m / scale + Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n)).eval();

  Vector v = Vector::Constant(n, Scalar(1) / std::sqrt(Scalar(n)));
  Scalar lambda = 0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    Vector w = shifted * v;
    const Scalar next = w.norm();
    w /= next;
    const Scalar change = (w - v).cwiseAbs().maxCoeff();
    v = w;
    if (std::abs(next - lambda) <= tolerance * next && change <= tolerance) {
      return {(next - Scalar(1)) * scale, v, it};
    }
    lambda = next;
  }
  throw NumericalError("perron_root: power iteration did not converge");
}

// Left Perron vector of a row-stochastic matrix, normalized to sum one.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> stationary_vector(
    const Eigen::MatrixBase<Derived> &P) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = P.rows();
  // Solve pi (P - I) = 0 with the normalization replacing one equation.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
      (P - Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(n, n)).transpose();
  a.row(n - 1).setOnes();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
  rhs(n - 1) = 1;
  return a.fullPivLu().solve(rhs);
}

}  // namespace thermo::linalg
