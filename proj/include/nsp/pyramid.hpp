#pragma once

// Nonstationary pyramid transform and executable versions of its decay and
// stability bounds.
//
// Analysis, for l = J..1:
//   c^(l-1) = D_zeta(l) c^(l),   d^(l) = c^(l) - S_alpha(l) c^(l-1)
// Synthesis, for l = 1..J:
//   c^(l) = S_alpha(l) c^(l-1) + d^(l)
// Pyramid level l uses mask_at_level(family, l - 1), with the family
// parameters describing the coarsest grid c^(0).
//
// Multi-component data (planar curves) is processed component-wise with the
// same masks and filters; norms of detail coefficients are Euclidean across
// components.

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "nsp/decimation.hpp"
#include "nsp/error.hpp"
#include "nsp/sequence.hpp"
#include "nsp/subdivision.hpp"

namespace nsp {

inline constexpr double kDefaultEpsilon = 1e-15;

enum class Boundary { Finite, Periodic };

template <Sequence Seq>
constexpr Boundary boundary_of() {
  return is_periodic_seq<Seq>::value ? Boundary::Periodic : Boundary::Finite;
}

template <typename Scalar>
struct PyramidLevel {
  Mask<Scalar> mask;
  DecimationFilter<Scalar> filter;
};

template <Sequence Seq>
struct Pyramid {
  using Scalar = typename Seq::value_type;

  SchemeFamily family;
  double epsilon = kDefaultEpsilon;
  std::vector<Seq> coarse;                ///< c^(0), one entry per component
  std::vector<std::vector<Seq>> details;  ///< details[l-1][component] = d^(l)
  std::vector<PyramidLevel<Scalar>> levels;  ///< levels[l-1]

  static constexpr Boundary boundary = boundary_of<Seq>();

  int depth() const { return int(details.size()); }
  std::size_t components() const { return coarse.size(); }
};

namespace detail {

template <typename Scalar>
PyramidLevel<Scalar> make_level(const SchemeFamily& family, int level, double epsilon) {
  PyramidLevel<Scalar> lv;
  lv.mask = mask_at_level<Scalar>(family, level - 1);
  lv.filter = is_interpolating(lv.mask) ? identity_filter<Scalar>(lv.mask.level, epsilon)
                                        : solve_gamma(lv.mask, epsilon);
  return lv;
}

}  // namespace detail

/// Per-level masks and filters for levels 1..J.
template <typename Scalar = double>
std::vector<PyramidLevel<Scalar>> pyramid_levels(const SchemeFamily& family, int J,
                                                 double epsilon) {
  std::vector<PyramidLevel<Scalar>> out;
  out.reserve(std::size_t(J));
  for (int l = 1; l <= J; ++l) out.push_back(detail::make_level<Scalar>(family, l, epsilon));
  return out;
}

template <Sequence Seq>
Pyramid<Seq> analyze(std::vector<Seq> fine, const SchemeFamily& family, int J,
                     double epsilon = kDefaultEpsilon) {
  using Scalar = typename Seq::value_type;
  if (J < 1) throw Error(ErrorCode::BadParams, "J must be >= 1");
  if (fine.empty()) throw Error(ErrorCode::BadParams, "no components to analyze");
  if constexpr (is_periodic_seq<Seq>::value) {
    const Index period = fine.front().period();
    for (const auto& c : fine)
      if (c.period() != period) throw Error(ErrorCode::ShapeMismatch, "component periods differ");
    if (J >= 62 || period % (Index(1) << J) != 0)
      throw Error(ErrorCode::PeriodNotDivisible,
                  "period " + std::to_string(period) + " is not divisible by 2^" +
                      std::to_string(J));
  }

  Pyramid<Seq> p;
  p.family = family;
  p.epsilon = epsilon;
  p.levels = pyramid_levels<Scalar>(family, J, epsilon);
  p.details.resize(std::size_t(J));
  for (int l = J; l >= 1; --l) {
    const auto& lv = p.levels[std::size_t(l - 1)];
    auto& d = p.details[std::size_t(l - 1)];
    d.reserve(fine.size());
    for (auto& c : fine) {
      Seq coarser = decimate(lv.filter, c);
      d.push_back(c - refine(lv.mask, coarser));
      c = std::move(coarser);
    }
  }
  p.coarse = std::move(fine);
  return p;
}

template <Sequence Seq>
Pyramid<Seq> analyze(const Seq& fine, const SchemeFamily& family, int J,
                     double epsilon = kDefaultEpsilon) {
  return analyze(std::vector<Seq>{fine}, family, J, epsilon);
}

template <Sequence Seq>
std::vector<Seq> synthesize(const Pyramid<Seq>& p) {
  if (p.levels.size() != p.details.size())
    throw Error(ErrorCode::ShapeMismatch, "pyramid has " + std::to_string(p.levels.size()) +
                                              " level records for " +
                                              std::to_string(p.details.size()) + " detail levels");
  std::vector<Seq> c = p.coarse;
  for (std::size_t l = 0; l < p.details.size(); ++l) {
    const auto& d = p.details[l];
    if (d.size() != c.size())
      throw Error(ErrorCode::ShapeMismatch, "level " + std::to_string(l + 1) + " has " +
                                                std::to_string(d.size()) + " components, expected " +
                                                std::to_string(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k) {
      if constexpr (is_periodic_seq<Seq>::value) {
        if (d[k].period() != 2 * c[k].period())
          throw Error(ErrorCode::ShapeMismatch,
                      "detail period " + std::to_string(d[k].period()) + " at level " +
                          std::to_string(l + 1) + ", expected " +
                          std::to_string(2 * c[k].period()));
      }
      c[k] = refine(p.levels[l].mask, c[k]) + d[k];
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Detail statistics

/// Pointwise Euclidean norm across components, over the union of supports.
template <typename Scalar>
VectorX<Scalar> pointwise_norms(const std::vector<PeriodicSeq<Scalar>>& comps) {
  VectorX<Scalar> sq = VectorX<Scalar>::Zero(comps.front().period());
  for (const auto& c : comps) sq += c.values().cwiseAbs2();
  return sq.cwiseSqrt();
}

template <typename Scalar>
VectorX<Scalar> pointwise_norms(const std::vector<FinSeq<Scalar>>& comps) {
  Index lo = std::numeric_limits<Index>::max(), hi = std::numeric_limits<Index>::min();
  for (const auto& c : comps) {
    if (c.empty()) continue;
    lo = std::min(lo, c.first());
    hi = std::max(hi, c.last());
  }
  if (hi < lo) return {};
  VectorX<Scalar> sq = VectorX<Scalar>::Zero(hi - lo + 1);
  for (const auto& c : comps)
    if (!c.empty()) sq.segment(c.first() - lo, c.size()) += c.coeffs().cwiseAbs2();
  return sq.cwiseSqrt();
}

struct LevelStats {
  int level = 0;
  double linf = 0.0;    ///< max_j ||d_j||
  double l1 = 0.0;      ///< sum_j ||d_j||
  double avg_l2 = 0.0;  ///< l1 / number of coefficients
  /// linf(l) / linf(l+1); NaN on the finest level.
  double ratio_to_next = std::numeric_limits<double>::quiet_NaN();
};

template <Sequence Seq>
std::vector<LevelStats> detail_decay_report(const Pyramid<Seq>& p) {
  std::vector<LevelStats> out;
  for (int l = 1; l <= p.depth(); ++l) {
    const auto norms = pointwise_norms(p.details[std::size_t(l - 1)]);
    LevelStats s;
    s.level = l;
    if (norms.size() > 0) {
      s.linf = double(norms.maxCoeff());
      s.l1 = double(norms.sum());
      s.avg_l2 = s.l1 / double(norms.size());
    }
    out.push_back(s);
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i)
    out[i].ratio_to_next = out[i].linf / out[i + 1].linf;
  return out;
}

/// K_{alpha,zeta} = K_zeta ||alpha||_1 + K_alpha ||zeta||_1.
template <typename Scalar>
double k_alpha_zeta(const PyramidLevel<Scalar>& lv) {
  return double(k_const(lv.filter.zeta) * norm_l1(lv.mask.taps) +
                k_const(lv.mask.taps) * norm_l1(lv.filter.zeta));
}

/// Right-hand side of the detail decay bound for levels 1..J, for fine data
/// sampled on 2^-J Z from f with sup|f'| = fprime_inf:
///   K_{alpha,zeta}(l) * fprime_inf * prod_{m=l+1..J} ||zeta(m)||_1 * 2^-l
template <typename Scalar>
std::vector<double> detail_decay_bound(const std::vector<PyramidLevel<Scalar>>& levels,
                                       double fprime_inf) {
  const int J = int(levels.size());
  std::vector<double> out(static_cast<std::size_t>(J));
  for (int l = 1; l <= J; ++l) {
    double prod = 1.0;
    for (int m = l + 1; m <= J; ++m) prod *= double(norm_l1(levels[std::size_t(m - 1)].filter.zeta));
    out[std::size_t(l - 1)] =
        k_alpha_zeta(levels[std::size_t(l - 1)]) * fprime_inf * prod * std::ldexp(1.0, -l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Stability

/// L = M^J if M > 1 else 1, with M the largest ||S_alpha(l)||_inf.
template <typename Scalar>
double reconstruction_stability_bound(const std::vector<PyramidLevel<Scalar>>& levels) {
  double M = 0.0;
  for (const auto& lv : levels) M = std::max(M, double(operator_norm_inf(lv.mask)));
  return M > 1.0 ? std::pow(M, double(levels.size())) : 1.0;
}

inline double reconstruction_stability_bound(const SchemeFamily& family, int J) {
  double M = 0.0;
  for (int l = 1; l <= J; ++l)
    M = std::max(M, operator_norm_inf(mask_at_level<double>(family, l - 1)));
  return M > 1.0 ? std::pow(M, double(J)) : 1.0;
}

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds() const { return lhs <= rhs; }
  double slack() const { return rhs - lhs; }
};

namespace detail {

template <Sequence Seq>
double max_diff(const std::vector<Seq>& a, const std::vector<Seq>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "component counts differ");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, double(norm_inf(a[k] - b[k])));
  return m;
}

}  // namespace detail

/// ||c^J - c~^J|| <= L (||c^0 - c~^0|| + sum_l ||d^l - d~^l||), evaluated after
/// synthesizing both pyramids. L comes from the masks of `p`.
template <Sequence Seq>
BoundCheck check_reconstruction_stability(const Pyramid<Seq>& p, const Pyramid<Seq>& q) {
  if (p.depth() != q.depth()) throw Error(ErrorCode::ShapeMismatch, "pyramid depths differ");
  BoundCheck out;
  out.lhs = detail::max_diff(synthesize(p), synthesize(q));
  double sum = detail::max_diff(p.coarse, q.coarse);
  for (int l = 0; l < p.depth(); ++l)
    sum += detail::max_diff(p.details[std::size_t(l)], q.details[std::size_t(l)]);
  out.rhs = reconstruction_stability_bound(p.levels) * sum;
  return out;
}

struct DecompositionCheck {
  BoundCheck coarse;                ///< coarse-level inequality
  std::vector<BoundCheck> details;  ///< details[l-1], checked against the upper norm bound
  /// Randomized lower-bound estimates of ||I - S D||_inf per level.
  std::vector<double> residual_norm_estimate;
  /// Analytic upper bounds 1 + ||S||_inf ||zeta||_1 per level.
  std::vector<double> residual_norm_upper;

  bool holds() const {
    if (!coarse.holds()) return false;
    for (const auto& d : details)
      if (!d.holds()) return false;
    return true;
  }
};

/// Lower-bound estimate of ||I - S_alpha D_zeta||_inf from random sequences
/// with unit sup norm. Deterministic for a given seed.
template <typename Scalar>
double estimate_residual_operator_norm(const PyramidLevel<Scalar>& lv, Index period, int trials = 200,
                                       unsigned seed = 7) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Index n = std::max<Index>(period, 2 * coarse_reach(lv.mask));
  const Index even_n = n + (n % 2);
  double best = 0.0;
  for (int t = 0; t < trials; ++t) {
    VectorX<Scalar> v(even_n);
    for (Index i = 0; i < even_n; ++i) v[i] = Scalar(unif(rng) < 0 ? -1.0 : 1.0);
    if (t % 2 == 1)
      for (Index i = 0; i < even_n; ++i) v[i] = Scalar(unif(rng));
    const PeriodicSeq<Scalar> c(v);
    const PeriodicSeq<Scalar> r = c - refine(lv.mask, decimate(lv.filter, c));
    best = std::max(best, double(norm_inf(r)) / double(norm_inf(c)));
  }
  return best;
}

/// Runs both analyses and evaluates
///   ||c^0 - c~^0|| <= prod_m ||zeta(m)||_1 ||c^J - c~^J||
///   ||d^l - d~^l|| <= ||I - S D||(l) ||zeta(l)||_1^-1 prod_{m>=l} ||zeta(m)||_1 ||c^J - c~^J||
template <Sequence Seq>
DecompositionCheck check_decomposition_stability(const std::vector<Seq>& c,
                                                 const std::vector<Seq>& c_tilde,
                                                 const SchemeFamily& family, int J,
                                                 double epsilon = kDefaultEpsilon) {
  const auto p = analyze(c, family, J, epsilon);
  const auto q = analyze(c_tilde, family, J, epsilon);
  const double fine_diff = detail::max_diff(c, c_tilde);

  std::vector<double> zeta_l1;
  for (const auto& lv : p.levels) zeta_l1.push_back(double(norm_l1(lv.filter.zeta)));

  DecompositionCheck out;
  double prod_all = 1.0;
  for (double z : zeta_l1) prod_all *= z;
  out.coarse.lhs = detail::max_diff(p.coarse, q.coarse);
  out.coarse.rhs = prod_all * fine_diff;

  Index period = 64;
  if constexpr (is_periodic_seq<Seq>::value) period = c.front().period();
  for (int l = 1; l <= J; ++l) {
    const auto& lv = p.levels[std::size_t(l - 1)];
    const double upper = 1.0 + double(operator_norm_inf(lv.mask)) * zeta_l1[std::size_t(l - 1)];
    const Index level_period = std::max<Index>(period >> (J - l), 2);
    out.residual_norm_upper.push_back(upper);
    out.residual_norm_estimate.push_back(estimate_residual_operator_norm(lv, level_period));
    double prod = 1.0;
    for (int m = l + 1; m <= J; ++m) prod *= zeta_l1[std::size_t(m - 1)];
    BoundCheck b;
    b.lhs = detail::max_diff(p.details[std::size_t(l - 1)], q.details[std::size_t(l - 1)]);
    b.rhs = upper * prod * fine_diff;
    out.details.push_back(b);
  }
  return out;
}

}  // namespace nsp
