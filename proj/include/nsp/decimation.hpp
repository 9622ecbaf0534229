#pragma once

// Reverse decimation filters: solve gamma * (alpha↓2) = delta, truncate at a
// threshold and normalize to unit sum.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "nsp/error.hpp"
#include "nsp/sequence.hpp"
#include "nsp/subdivision.hpp"

namespace nsp {

inline constexpr int kSymbolSamples = 4096;
inline constexpr double kSymbolZeroThreshold = 1e-9;
inline constexpr Index kMaxWindow = Index(1) << 16;
inline constexpr double kWindowAgreement = 1e-13;

/// Geometric envelope |gamma_j| <= C lambda^|j|.
struct DecayFit {
  double C = 0.0;
  double lambda = 0.0;
};

template <typename Scalar = double>
struct DecimationFilter {
  FinSeq<Scalar> zeta;       ///< normalized truncated filter
  FinSeq<Scalar> gamma_raw;  ///< truncated filter before normalization
  double epsilon = 0.0;
  double residual_l1 = 0.0;  ///< ||delta - (alpha↓2) * zeta||_1
  std::optional<DecayFit> decay;  ///< absent for single-tap filters
  int source_mask_level = 0;
  Index window = 0;  ///< half-width W of the final Toeplitz section
};

template <typename Scalar>
FinSeq<Scalar> even_mask(const Mask<Scalar>& m) {
  FinSeq<Scalar> even = downsample2(m.taps);
  if (even.empty()) throw Error(ErrorCode::EmptyEvenPart, "mask has no even taps");
  return even;
}

/// min over equispaced omega of |sum_j a_j e^{ij omega}|.
template <typename Scalar>
double symbol_min_modulus(const FinSeq<Scalar>& a, int samples = kSymbolSamples) {
  double m = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const double omega = 2.0 * std::numbers::pi * s / samples;
    std::complex<double> z(0.0, 0.0);
    for (Index i = 0; i < a.size(); ++i)
      z += double(a.coeffs()[i]) * std::polar(1.0, omega * double(a.offset() + i));
    m = std::min(m, std::abs(z));
  }
  return m;
}

/// Winding number of the symbol around 0 along the unit circle.
template <typename Scalar>
int symbol_winding(const FinSeq<Scalar>& a, int samples = kSymbolSamples) {
  auto eval = [&](double omega) {
    std::complex<double> z(0.0, 0.0);
    for (Index i = 0; i < a.size(); ++i)
      z += double(a.coeffs()[i]) * std::polar(1.0, omega * double(a.offset() + i));
    return z;
  };
  double total = 0.0;
  std::complex<double> prev = eval(0.0);
  for (int s = 1; s <= samples; ++s) {
    const std::complex<double> cur = eval(2.0 * std::numbers::pi * s / samples);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(total / (2.0 * std::numbers::pi)));
}

namespace detail {

/// Solves the section [-W, W] of the Laurent system sum_t a_t g_{i-t} = delta_i.
template <typename Scalar>
VectorX<Scalar> solve_toeplitz_section(const FinSeq<Scalar>& a, Index W) {
  const Index n = 2 * W + 1;
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(std::size_t(n * a.size()));
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < a.size(); ++t) {
      const Index j = i - (a.offset() + t);
      if (j >= 0 && j < n) triplets.emplace_back(i, j, a.coeffs()[t]);
    }
  }
  Eigen::SparseMatrix<Scalar> M(n, n);
  M.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "Toeplitz section is singular at W=" + std::to_string(W));
  VectorX<Scalar> rhs = VectorX<Scalar>::Zero(n);
  rhs[W] = Scalar(1);
  VectorX<Scalar> g = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "Toeplitz solve failed at W=" + std::to_string(W));
  return g;
}

}  // namespace detail

/// Bi-infinite inverse of `a` under convolution, computed on a growing window.
/// Returns the window solution (indices -W..W) untruncated, and W.
template <typename Scalar>
std::pair<FinSeq<Scalar>, Index> invert_laurent(const FinSeq<Scalar>& a, double epsilon) {
  using std::abs;
  if (a.empty()) throw Error(ErrorCode::EmptyEvenPart, "cannot invert an empty sequence");
  if (a.size() == 1) {
    // c z^o inverts to (1/c) z^-o.
    return {FinSeq<Scalar>(-a.offset(), {Scalar(1) / a.coeffs()[0]}), 0};
  }
  const double min_mod = symbol_min_modulus(a);
  if (!(min_mod > kSymbolZeroThreshold))
    throw Error(ErrorCode::SymbolZeroOnCircle,
                "min |symbol| on the unit circle is " + std::to_string(min_mod));

  // Finite sections converge only for winding number 0, so solve for
  // z^-w a(z) and shift the result back.
  const int w = symbol_winding(a);
  const FinSeq<Scalar> centered(a.offset() - w, a.coeffs());

  const Index half_width = std::max(std::abs(centered.first()), std::abs(centered.last()));
  Index W = std::max<Index>(16, 4 * half_width);
  VectorX<Scalar> prev;
  Index prev_W = 0;
  const Scalar tail_tol = Scalar(epsilon / 10.0);
  for (;;) {
    if (W > kMaxWindow)
      throw Error(ErrorCode::NoConvergence, "window exceeded " + std::to_string(kMaxWindow));
    VectorX<Scalar> g = detail::solve_toeplitz_section(centered, W);

    Scalar tail(0);
    for (Index j = -W; j <= W; ++j)
      if (2 * std::abs(j) > W) tail = std::max(tail, Scalar(abs(g[j + W])));
    bool agree = false;
    if (prev_W > 0) {
      Scalar diff(0);
      for (Index j = -prev_W; j <= prev_W; ++j)
        diff = std::max(diff, Scalar(abs(g[j + W] - prev[j + prev_W])));
      agree = diff <= Scalar(kWindowAgreement);
    }
    if (tail < tail_tol && agree) {
      // centered(z) = z^-w a(z), so a^-1(z) = z^-w centered^-1(z).
      return {FinSeq<Scalar>(-W - w, std::move(g)), W};
    }
    prev = std::move(g);
    prev_W = W;
    W *= 2;
  }
}

/// Least-squares fit of log|gamma_j| against |j|, then C raised so the
/// envelope dominates every coefficient.
template <typename Scalar>
DecayFit decay_fit(const FinSeq<Scalar>& gamma) {
  std::vector<double> xs, ys;
  for (Index i = 0; i < gamma.size(); ++i) {
    const double g = double(gamma.coeffs()[i]);
    if (g == 0.0) continue;
    xs.push_back(double(std::abs(gamma.offset() + i)));
    ys.push_back(std::log(std::abs(g)));
  }
  if (xs.size() < 5)
    throw Error(ErrorCode::FitFailed, "need at least 5 nonzero coefficients, have " +
                                          std::to_string(xs.size()));
  Eigen::MatrixX2d A(Index(xs.size()), 2);
  Eigen::VectorXd y(Index(ys.size()));
  for (Index i = 0; i < A.rows(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = xs[std::size_t(i)];
    y[i] = ys[std::size_t(i)];
  }
  const Eigen::Vector2d coef = A.colPivHouseholderQr().solve(y);
  const double lambda = std::exp(coef[1]);
  if (!(lambda < 1.0) || !(lambda > 0.0))
    throw Error(ErrorCode::FitFailed, "fitted lambda " + std::to_string(lambda) + " not in (0,1)");
  double C = std::exp(coef[0]);
  for (std::size_t i = 0; i < xs.size(); ++i)
    C = std::max(C, std::exp(ys[i] - xs[i] * coef[1]));
  return {C, lambda};
}

/// ||delta - (alpha↓2) * zeta||_1.
template <typename Scalar>
Scalar residual_check(const DecimationFilter<Scalar>& f, const Mask<Scalar>& m) {
  return norm_l1(FinSeq<Scalar>::delta() - convolve(even_mask(m), f.zeta));
}

template <typename Scalar>
DecimationFilter<Scalar> solve_gamma(const Mask<Scalar>& m, double epsilon) {
  using std::abs;
  if (!(epsilon > 0.0)) throw Error(ErrorCode::BadParams, "epsilon must be positive");
  const FinSeq<Scalar> even = even_mask(m);
  auto [gamma, W] = invert_laurent(even, epsilon);

  VectorX<Scalar> kept = gamma.coeffs();
  for (Index i = 0; i < kept.size(); ++i)
    if (!(abs(kept[i]) > Scalar(epsilon))) kept[i] = Scalar(0);
  FinSeq<Scalar> truncated(gamma.offset(), std::move(kept));
  if (truncated.empty())
    throw Error(ErrorCode::BadParams, "epsilon removes every coefficient of gamma");
  const Scalar total = truncated.sum();
  if (abs(total) < Scalar(kDenominatorGuard))
    throw Error(ErrorCode::DegenerateParameter, "truncated gamma sums to ~0");

  DecimationFilter<Scalar> f;
  f.gamma_raw = truncated;
  f.zeta = FinSeq<Scalar>(truncated.offset(), (truncated.coeffs() / total).eval());
  f.epsilon = epsilon;
  f.source_mask_level = m.level;
  f.window = W;
  f.residual_l1 = double(residual_check(f, m));
  if (truncated.size() > 1) {
    try {
      f.decay = decay_fit(truncated);
    } catch (const Error&) {
      f.decay.reset();
    }
  }
  return f;
}

/// The filter for plain downsampling.
template <typename Scalar = double>
DecimationFilter<Scalar> identity_filter(int level, double epsilon) {
  DecimationFilter<Scalar> f;
  f.zeta = FinSeq<Scalar>::delta();
  f.gamma_raw = FinSeq<Scalar>::delta();
  f.epsilon = epsilon;
  f.source_mask_level = level;
  return f;
}

/// D_zeta(c) = zeta * (c↓2).
template <Sequence Seq>
Seq decimate(const DecimationFilter<typename Seq::value_type>& f, const Seq& c) {
  return convolve(f.zeta, downsample2(c));
}

}  // namespace nsp
