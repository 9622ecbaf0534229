#pragma once

// Subdivision masks, level-dependent mask families and the refinement
// operator S_alpha.
//
// Level convention: mask_at_level(family, k) is the mask used for the step
// that follows k completed refinement steps (k = 0 is the first step).
//   NS4Point(theta):  half-spacing angle s = theta / 2^(k+1)
//   NSCubic(v_init):  v = v_next^(k+1)(v_init)
//   Conic(v_init):    v = v_next^(k+1)(v_init)
// All masks are stored centered: interpolating schemes put the copy tap at 0,
// symmetric schemes are symmetric about 0.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "nsp/error.hpp"
#include "nsp/sequence.hpp"

namespace nsp {

inline constexpr double kParityTolerance = 1e-12;
inline constexpr double kDenominatorGuard = 1e-12;

// ---------------------------------------------------------------------------
// Families

struct StationaryFamily {
  FinSeq<double> taps;
};

struct NS4PointFamily {
  double theta = 0.0;
};

struct NSCubicFamily {
  double v_init = 1.0;
};

struct ConicFamily {
  double v_init = 1.0;
};

using SchemeFamily = std::variant<StationaryFamily, NS4PointFamily, NSCubicFamily, ConicFamily>;

enum class FamilyKind { Stationary, NS4Point, NSCubic, Conic };

inline FamilyKind kind_of(const SchemeFamily& f) { return static_cast<FamilyKind>(f.index()); }

constexpr std::string_view family_name(FamilyKind k) {
  switch (k) {
    case FamilyKind::Stationary: return "stationary";
    case FamilyKind::NS4Point: return "ns4pt";
    case FamilyKind::NSCubic: return "nscubic";
    case FamilyKind::Conic: return "conic";
  }
  return "unknown";
}

/// The cubic B-spline mask {1/8, 1/2, 3/4, 1/2, 1/8} centered at 0.
inline FinSeq<double> cubic_bspline_taps() {
  return FinSeq<double>(-2, {0.125, 0.5, 0.75, 0.5, 0.125});
}

/// The 4-point Dubuc-Deslauriers mask centered on the copy tap.
inline FinSeq<double> four_point_taps() {
  return FinSeq<double>(-3, {-1.0 / 16, 0.0, 9.0 / 16, 1.0, 9.0 / 16, 0.0, -1.0 / 16});
}

// ---------------------------------------------------------------------------
// Curve classes for the conic-reproducing scheme

struct Polynomial {};
struct Hyperbolic {
  double sigma;
};
struct Trigonometric {
  double sigma;
};
using CurveClass = std::variant<Polynomial, Hyperbolic, Trigonometric>;

/// v^(-1) for samples of a function in the given class; sigma is the sample
/// spacing angle, typically 2*pi/N for N samples of a closed curve.
inline double initial_v(const CurveClass& cls) {
  struct Visitor {
    double operator()(Polynomial) const { return 1.0; }
    double operator()(Hyperbolic h) const { return std::cosh(h.sigma); }
    double operator()(Trigonometric t) const { return std::cos(t.sigma); }
  };
  return std::visit(Visitor{}, cls);
}

// ---------------------------------------------------------------------------
// Mask

template <typename Scalar = double>
struct Mask {
  FinSeq<Scalar> taps;
  int level = 0;
  FamilyKind family = FamilyKind::Stationary;
  /// Level parameter the taps were generated from: v for NSCubic/Conic, the
  /// half-spacing angle s for NS4Point, NaN for stationary masks.
  double parameter = std::numeric_limits<double>::quiet_NaN();
};

/// (sum of even taps, sum of odd taps).
template <typename Scalar>
std::pair<Scalar, Scalar> parity_sums(const Mask<Scalar>& m) {
  Scalar even(0), odd(0);
  for (Index i = 0; i < m.taps.size(); ++i)
    (detail::pos_mod(m.taps.offset() + i, 2) == 0 ? even : odd) += m.taps.coeffs()[i];
  return {even, odd};
}

/// max(|even sum - 1|, |odd sum - 1|).
template <typename Scalar>
Scalar parity_defect(const Mask<Scalar>& m) {
  using std::abs;
  auto [even, odd] = parity_sums(m);
  return std::max(abs(even - Scalar(1)), abs(odd - Scalar(1)));
}

/// ||S_alpha||_inf = max(sum |alpha_2k|, sum |alpha_2k+1|).
template <typename Scalar>
Scalar operator_norm_inf(const Mask<Scalar>& m) {
  using std::abs;
  Scalar even(0), odd(0);
  for (Index i = 0; i < m.taps.size(); ++i)
    (detail::pos_mod(m.taps.offset() + i, 2) == 0 ? even : odd) += abs(m.taps.coeffs()[i]);
  return std::max(even, odd);
}

/// True when the even taps are exactly the unit impulse at 0.
template <typename Scalar>
bool is_interpolating(const Mask<Scalar>& m) {
  for (Index j = m.taps.first(); j <= m.taps.last() && !m.taps.empty(); ++j) {
    if (detail::pos_mod(j, 2) != 0) continue;
    if (m.taps[j] != (j == 0 ? Scalar(1) : Scalar(0))) return false;
  }
  return m.taps[0] == Scalar(1);
}

/// Number of coarse samples one fine output sample depends on, maximized over
/// the two parities.
template <typename Scalar>
Index coarse_reach(const Mask<Scalar>& m) {
  Index reach = 0;
  for (int parity = 0; parity < 2; ++parity) {
    Index lo = 0, hi = -1;
    bool any = false;
    for (Index j = m.taps.first(); j <= m.taps.last() && !m.taps.empty(); ++j) {
      if (detail::pos_mod(j, 2) != parity || m.taps[j] == Scalar(0)) continue;
      if (!any) lo = j;
      hi = j;
      any = true;
    }
    if (any) reach = std::max(reach, (hi - lo) / 2 + 1);
  }
  return reach;
}

// ---------------------------------------------------------------------------
// Level parameters

/// v -> sqrt((1 + v) / 2); the half-angle map, fixed point 1.
template <typename Scalar>
Scalar v_next(Scalar v) {
  using std::sqrt;
  if (!(v > Scalar(-1)))
    throw Error(ErrorCode::DomainError, "v_next requires v > -1, got " + std::to_string(double(v)));
  return sqrt((Scalar(1) + v) / Scalar(2));
}

/// v^(k) from v^(-1): k + 1 applications of v_next.
template <typename Scalar>
Scalar v_at_level(Scalar v_init, int k) {
  Scalar v = v_init;
  for (int i = 0; i <= k; ++i) v = v_next(v);
  return v;
}

namespace detail {

template <typename Scalar>
void guard_denominator(Scalar d, std::string_view what) {
  using std::abs;
  if (!(abs(d) >= Scalar(kDenominatorGuard)))
    throw Error(ErrorCode::DegenerateParameter,
                std::string(what) + " denominator " + std::to_string(double(d)));
}

}  // namespace detail

/// (a, b) of the conic-reproducing scheme, evaluated as printed for v.
template <typename Scalar>
std::pair<Scalar, Scalar> conic_params(Scalar v) {
  using std::abs;
  using std::sqrt;
  if (!(v > Scalar(-1)))
    throw Error(ErrorCode::DomainError, "conic scheme requires v > -1");
  if (abs(v) < Scalar(kDenominatorGuard) || abs(v - Scalar(1)) < Scalar(kDenominatorGuard))
    throw Error(ErrorCode::DegenerateParameter,
                "conic parameters are singular at v = " + std::to_string(double(v)) +
                    " (polynomial limit)");
  const Scalar r = sqrt(Scalar(2) * (v + Scalar(1)));
  const Scalar common = v + Scalar(3) + Scalar(2) * r;
  const Scalar den_a = Scalar(8) * v * (v - Scalar(1)) * r * common;
  const Scalar den_b = Scalar(2) * v * r * common;
  detail::guard_denominator(den_a, "conic a");
  detail::guard_denominator(den_b, "conic b");
  const Scalar a = (Scalar(2) + r) * (Scalar(2) - v * r) / den_a;
  const Scalar b = ((v + Scalar(1)) * (v - Scalar(2)) - Scalar(2) * r) / den_b;
  return {a, b};
}

/// Conic-reproducing mask for parameter v, taps at -4..4.
template <typename Scalar>
FinSeq<Scalar> conic_taps(Scalar v) {
  const auto [a, b] = conic_params(v);
  const Scalar den = Scalar(4) * (v + Scalar(1));
  detail::guard_denominator(den, "conic 4(v+1)");
  const Scalar far_even = a / den;
  const Scalar near_even = (Scalar(1) + Scalar(2) * v * (b + Scalar(2) * a)) / den;
  const Scalar center =
      (Scalar(4) * v * (Scalar(1) - b - Scalar(2) * a) - Scalar(2) * a + Scalar(2)) / den;
  const Scalar far_odd = (Scalar(2) * a * (v + Scalar(1)) + b) / den;
  const Scalar near_odd = ((Scalar(2) - Scalar(2) * a) * (v + Scalar(1)) - b) / den;
  return FinSeq<Scalar>(-4, {far_even, far_odd, near_even, near_odd, center, near_odd, near_even,
                             far_odd, far_even});
}

/// Nonstationary cubic B-spline mask for parameter v, taps at -2..2.
template <typename Scalar>
FinSeq<Scalar> nscubic_taps(Scalar v) {
  if (!(v > Scalar(-1))) throw Error(ErrorCode::DomainError, "nscubic requires v > -1");
  const Scalar den = Scalar(2) * (v + Scalar(1)) * (v + Scalar(1));
  detail::guard_denominator(den, "nscubic 2(v+1)^2");
  const Scalar outer = Scalar(1) / den;
  const Scalar odd = Scalar(4) * v / den;  // 2v / (v+1)^2
  const Scalar center = (Scalar(4) * v * v + Scalar(2)) / den;
  return FinSeq<Scalar>(-2, {outer, odd, center, odd, outer});
}

/// Nonstationary 4-point mask for half-spacing angle s, taps at -3..3.
/// Odd weights solve w + u = 1/2 and w cos(3s) + u cos(s) = 1/2.
template <typename Scalar>
FinSeq<Scalar> ns4point_taps(Scalar s) {
  using std::cos;
  const Scalar c_half = cos(s / Scalar(2));
  const Scalar c = cos(s);
  const Scalar den = Scalar(16) * c_half * c_half * c;
  detail::guard_denominator(den, "ns4pt 16cos^2(s/2)cos(s)");
  const Scalar w = Scalar(-1) / den;
  const Scalar one_2c = Scalar(1) + Scalar(2) * c;
  const Scalar u = one_2c * one_2c / den;
  return FinSeq<Scalar>(-3, {w, Scalar(0), u, Scalar(1), u, Scalar(0), w});
}

template <typename Scalar = double>
Mask<Scalar> mask_at_level(const SchemeFamily& family, int k) {
  if (k < 0) throw Error(ErrorCode::BadParams, "mask level must be >= 0");
  Mask<Scalar> m;
  m.level = k;
  m.family = kind_of(family);
  bool check_parity = true;
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, StationaryFamily>) {
          m.taps = FinSeq<Scalar>(f.taps.offset(), f.taps.coeffs().template cast<Scalar>());
        } else if constexpr (std::is_same_v<F, NS4PointFamily>) {
          const Scalar s = Scalar(f.theta) / Scalar(std::ldexp(1.0, k + 1));
          m.parameter = double(s);
          m.taps = ns4point_taps(s);
        } else if constexpr (std::is_same_v<F, NSCubicFamily>) {
          const Scalar v = v_at_level(Scalar(f.v_init), k);
          m.parameter = double(v);
          m.taps = nscubic_taps(v);
          // The printed rules only meet the parity condition asymptotically.
          check_parity = false;
        } else {
          const Scalar v = v_at_level(Scalar(f.v_init), k);
          m.parameter = double(v);
          m.taps = conic_taps(v);
        }
      },
      family);
  if (m.taps.empty()) throw Error(ErrorCode::InvalidMask, "mask has no nonzero taps");
  if (check_parity && !(parity_defect(m) <= Scalar(kParityTolerance)))
    throw Error(ErrorCode::InvalidMask,
                "parity sums differ from 1 by " + std::to_string(double(parity_defect(m))));
  return m;
}

// ---------------------------------------------------------------------------
// Refinement

/// (S_alpha c)_j = sum_i alpha_{j-2i} c_i.
template <typename Scalar>
FinSeq<Scalar> refine(const Mask<Scalar>& m, const FinSeq<Scalar>& c) {
  return convolve(m.taps, upsample2(c));
}

/// Periodic refinement; period N becomes 2N.
template <typename Scalar>
PeriodicSeq<Scalar> refine(const Mask<Scalar>& m, const PeriodicSeq<Scalar>& c) {
  const Index reach = coarse_reach(m);
  if (c.period() < reach)
    throw Error(ErrorCode::PeriodTooShort, "period " + std::to_string(c.period()) +
                                               " is shorter than the mask reach " +
                                               std::to_string(reach));
  return convolve(m.taps, upsample2(c));
}

/// steps refinements with masks at levels 0..steps-1.
template <Sequence Seq>
Seq refine_n(const SchemeFamily& family, Seq c, int steps) {
  using Scalar = typename Seq::value_type;
  if (steps < 0) throw Error(ErrorCode::BadParams, "steps must be >= 0");
  for (int k = 0; k < steps; ++k) c = refine(mask_at_level<Scalar>(family, k), c);
  return c;
}

}  // namespace nsp
