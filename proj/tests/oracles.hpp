#pragma once

// Reference values computed without touching the library's algorithms:
// closed forms, binomial sums, brute-force enumeration and Eigen's dense
// eigensolver.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline double H(double p) {
  double h = 0.0;
  for (double q : {p, 1.0 - p})
    if (q > 0.0) h -= q * std::log(q);
  return h;
}

inline double binomial(int n, int j) {
  if (j < 0 || j > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
  return std::round(c);
}

// sum_{j <= r} C(n, j) (k-1)^j
inline double hamming_ball(int k, int n, int r) {
  double s = 0.0;
  for (int j = 0; j <= std::min(r, n); ++j) s += binomial(n, j) * std::pow(k - 1, j);
  return s;
}

inline double eta(double d) { return -d * std::log2(d) - (1 - d) * std::log2(1 - d); }

// Largest eigenvalue modulus via Eigen's general eigensolver.
inline double spectral_radius(const Eigen::MatrixXd &m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// Transfer matrix for a depth-1 potential: M(a, b) = A(a, b) e^{phi(a)}.
inline double pressure_depth1(const Eigen::MatrixXi &A, const std::vector<double> &phi) {
  Eigen::MatrixXd M = A.cast<double>();
  for (int a = 0; a < A.rows(); ++a) M.row(a) *= std::exp(phi[static_cast<std::size_t>(a)]);
  return std::log(spectral_radius(M));
}

// Transfer matrix for a depth-2 potential indexed by a*k + b.
inline double pressure_depth2(const Eigen::MatrixXi &A, const std::vector<double> &phi) {
  const int k = static_cast<int>(A.rows());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      if (A(a, b)) M(a, b) = std::exp(phi[static_cast<std::size_t>(a * k + b)]);
  return std::log(spectral_radius(M));
}

// Largest subset of `items` that is pairwise `separated`, by exhaustive search.
template <typename T>
std::size_t max_separated(const std::vector<T> &items, const std::function<bool(const T &, const T &)> &separated) {
  const std::size_t n = items.size();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (size <= best) continue;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = i + 1; j < n && ok; ++j)
        if (mask >> j & 1) ok = separated(items[i], items[j]);
    }
    if (ok) best = size;
  }
  return best;
}

// Type-counting value of the separated-set pressure for Bernoulli(p) on the
// full 2-shift with L = 1, eps = 1, n_eps mode and depth-1 phi = (a, b):
// words with j ones have weight e^{(n-j)a + jb}; the L = 1 neighbourhood keeps
// them iff |j/n - (1-p)| < theta.
inline double sp_type_count(int n, double p, double theta, double a, double b) {
  double best = -INFINITY;
  std::vector<double> logs;
  for (int j = 0; j <= n; ++j) {
    if (!(std::abs(static_cast<double>(j) / n - (1.0 - p)) < theta)) continue;
    logs.push_back(std::log(binomial(n, j)) + (n - j) * a + j * b);
    best = std::max(best, logs.back());
  }
  if (logs.empty()) return -INFINITY;
  double s = 0.0;
  for (double l : logs) s += std::exp(l - best);
  return (best + std::log(s)) / n;
}

// Markov cylinder mass by the product formula.
inline double markov_mass(const Eigen::MatrixXd &P, const Eigen::VectorXd &pi, const std::vector<int> &w) {
  if (w.empty()) return 1.0;
  double m = pi(w[0]);
  for (std::size_t i = 1; i < w.size(); ++i) m *= P(w[i - 1], w[i]);
  return m;
}

}  // namespace oracle
