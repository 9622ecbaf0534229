#pragma once

// Reference computations written independently of the library, used as test
// oracles. Plain std::vector arithmetic, no Eigen.

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

/// Sparse sequence as index -> value.
using Seq = std::map<long, double>;

inline Seq convolve(const Seq& a, const Seq& b) {
  Seq out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) out[i + j] += x * y;
  return out;
}

/// (S c)_j = sum_i a_{j-2i} c_i for finitely supported c.
inline Seq refine(const Seq& mask, const Seq& c) {
  Seq out;
  for (const auto& [i, ci] : c)
    for (const auto& [t, at] : mask) out[t + 2 * i] += at * ci;
  return out;
}

/// Periodic version on values c[0..N-1]; output has period 2N.
inline std::vector<double> refine_periodic(const Seq& mask, const std::vector<double>& c) {
  const long n = long(c.size());
  std::vector<double> out(std::size_t(2 * n), 0.0);
  for (long i = 0; i < n; ++i)
    for (const auto& [t, at] : mask) {
      long j = (t + 2 * i) % (2 * n);
      if (j < 0) j += 2 * n;
      out[std::size_t(j)] += at * c[std::size_t(i)];
    }
  return out;
}

/// Analytic inverse of the cubic B-spline even mask {1/8, 3/4, 1/8}.
inline double cubic_gamma(long j) {
  return std::sqrt(2.0) * std::pow(-3.0 + 2.0 * std::sqrt(2.0), double(std::labs(j)));
}

/// Dense Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(A[r][k]) > std::abs(A[p][k])) p = r;
    if (A[p][k] == 0.0) throw std::runtime_error("singular");
    std::swap(A[p], A[k]);
    std::swap(b[p], b[k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double f = A[r][k] / A[k][k];
      if (f == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) A[r][c] -= f * A[k][c];
      b[r] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= A[k][c] * x[c];
    x[k] = s / A[k][k];
  }
  return x;
}

/// Solves sum_t a_t g_{i-t} = delta_i for i in [-W, W]; returns g_{-W..W}.
inline std::vector<double> toeplitz_inverse(const Seq& a, long W) {
  const std::size_t n = std::size_t(2 * W + 1);
  std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
  for (long i = -W; i <= W; ++i)
    for (const auto& [t, at] : a) {
      const long j = i - t;
      if (j >= -W && j <= W) A[std::size_t(i + W)][std::size_t(j + W)] = at;
    }
  std::vector<double> rhs(n, 0.0);
  rhs[std::size_t(W)] = 1.0;
  return dense_solve(std::move(A), std::move(rhs));
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace oracle
