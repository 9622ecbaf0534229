#pragma once

// Finitely supported and periodic real sequences on Z, and the exact algebra
// the refinement and decimation operators are built from.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <initializer_list>
#include <limits>
#include <type_traits>

#include "nsp/error.hpp"

namespace nsp {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace detail {

// Python-style floor division and modulo; the offsets of FinSeq may be negative.
constexpr Index floor_div(Index a, Index b) {
  Index q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr Index pos_mod(Index a, Index n) {
  Index r = a % n;
  return r < 0 ? r + n : r;
}

template <typename Scalar>
constexpr Scalar denormal_flush() {
  return Scalar(1e-300);
}

}  // namespace detail

/// Finitely supported sequence: `coeffs[i]` is the value at index `offset + i`,
/// zero elsewhere. Always kept canonical: the stored range starts and ends at a
/// nonzero value, or is empty.
template <typename Scalar = double>
class FinSeq {
 public:
  using value_type = Scalar;
  using Vector = VectorX<Scalar>;

  FinSeq() = default;

  FinSeq(Index offset, Vector coeffs) : offset_(offset), coeffs_(std::move(coeffs)) {
    canonicalize();
  }

  FinSeq(Index offset, std::initializer_list<Scalar> values)
      : FinSeq(offset, Vector::Map(values.begin(), Index(values.size())).eval()) {}

  static FinSeq delta(Index at = 0) { return FinSeq(at, {Scalar(1)}); }

  Index offset() const noexcept { return offset_; }
  const Vector& coeffs() const noexcept { return coeffs_; }
  Index size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.size() == 0; }

  /// First and last index of the support. Only meaningful when non-empty.
  Index first() const noexcept { return offset_; }
  Index last() const noexcept { return offset_ + coeffs_.size() - 1; }

  Scalar operator[](Index j) const {
    const Index i = j - offset_;
    return (i >= 0 && i < coeffs_.size()) ? coeffs_[i] : Scalar(0);
  }

  Scalar sum() const { return coeffs_.sum(); }

  friend bool operator==(const FinSeq& a, const FinSeq& b) {
    return a.offset_ == b.offset_ && a.coeffs_.size() == b.coeffs_.size() &&
           a.coeffs_ == b.coeffs_;
  }

 private:
  void canonicalize() {
    using std::abs;
    for (Index i = 0; i < coeffs_.size(); ++i)
      if (abs(coeffs_[i]) < detail::denormal_flush<Scalar>()) coeffs_[i] = Scalar(0);
    Index lo = 0;
    Index hi = coeffs_.size();
    while (lo < hi && coeffs_[lo] == Scalar(0)) ++lo;
    while (hi > lo && coeffs_[hi - 1] == Scalar(0)) --hi;
    if (lo == hi) {
      offset_ = 0;
      coeffs_.resize(0);
      return;
    }
    if (lo != 0 || hi != coeffs_.size()) {
      Vector kept = coeffs_.segment(lo, hi - lo);
      coeffs_ = std::move(kept);
    }
    offset_ += lo;
  }

  Index offset_ = 0;
  Vector coeffs_;
};

/// Sequence with c[j + N] = c[j]; stores one period.
template <typename Scalar = double>
class PeriodicSeq {
 public:
  using value_type = Scalar;
  using Vector = VectorX<Scalar>;

  PeriodicSeq() = default;

  explicit PeriodicSeq(Vector values) : values_(std::move(values)) {
    if (values_.size() < 1) throw Error(ErrorCode::BadParams, "period must be >= 1");
  }

  PeriodicSeq(std::initializer_list<Scalar> values)
      : PeriodicSeq(Vector::Map(values.begin(), Index(values.size())).eval()) {}

  static PeriodicSeq constant(Index period, Scalar value) {
    return PeriodicSeq(Vector::Constant(period, value));
  }

  Index period() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }

  Scalar operator[](Index j) const { return values_[detail::pos_mod(j, period())]; }

  friend bool operator==(const PeriodicSeq& a, const PeriodicSeq& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Vector values_;
};

template <typename T>
struct is_fin_seq : std::false_type {};
template <typename S>
struct is_fin_seq<FinSeq<S>> : std::true_type {};

template <typename T>
struct is_periodic_seq : std::false_type {};
template <typename S>
struct is_periodic_seq<PeriodicSeq<S>> : std::true_type {};

template <typename T>
concept Sequence = is_fin_seq<T>::value || is_periodic_seq<T>::value;

// ---------------------------------------------------------------------------
// Convolution

/// Linear convolution (a*b)_j = sum_i a_i b_{j-i}.
template <typename Scalar>
FinSeq<Scalar> convolve(const FinSeq<Scalar>& a, const FinSeq<Scalar>& b) {
  if (a.empty() || b.empty()) return {};
  VectorX<Scalar> out = VectorX<Scalar>::Zero(a.size() + b.size() - 1);
  for (Index i = 0; i < a.size(); ++i) {
    const Scalar ai = a.coeffs()[i];
    if (ai == Scalar(0)) continue;
    out.segment(i, b.size()) += ai * b.coeffs();
  }
  return FinSeq<Scalar>(a.offset() + b.offset(), std::move(out));
}

/// Cyclic convolution of a finite filter with a periodic sequence. Filters
/// longer than the period wrap around as many times as needed.
template <typename Scalar>
PeriodicSeq<Scalar> convolve(const FinSeq<Scalar>& filter, const PeriodicSeq<Scalar>& c) {
  const Index n = c.period();
  VectorX<Scalar> out = VectorX<Scalar>::Zero(n);
  for (Index t = 0; t < filter.size(); ++t) {
    const Scalar ft = filter.coeffs()[t];
    if (ft == Scalar(0)) continue;
    const Index shift = detail::pos_mod(filter.offset() + t, n);
    // out[j] += f_t * c[j - shift]
    for (Index j = 0; j < n; ++j) out[j] += ft * c.values()[detail::pos_mod(j - shift, n)];
  }
  return PeriodicSeq<Scalar>(std::move(out));
}

// ---------------------------------------------------------------------------
// Dyadic resampling

template <typename Scalar>
FinSeq<Scalar> upsample2(const FinSeq<Scalar>& c) {
  if (c.empty()) return {};
  VectorX<Scalar> out = VectorX<Scalar>::Zero(2 * c.size() - 1);
  for (Index i = 0; i < c.size(); ++i) out[2 * i] = c.coeffs()[i];
  return FinSeq<Scalar>(2 * c.offset(), std::move(out));
}

template <typename Scalar>
PeriodicSeq<Scalar> upsample2(const PeriodicSeq<Scalar>& c) {
  VectorX<Scalar> out = VectorX<Scalar>::Zero(2 * c.period());
  for (Index i = 0; i < c.period(); ++i) out[2 * i] = c.values()[i];
  return PeriodicSeq<Scalar>(std::move(out));
}

/// (c↓2)_j = c_{2j}.
template <typename Scalar>
FinSeq<Scalar> downsample2(const FinSeq<Scalar>& c) {
  if (c.empty()) return {};
  const Index lo = -detail::floor_div(-c.first(), 2);  // ceil(first / 2)
  const Index hi = detail::floor_div(c.last(), 2);
  if (hi < lo) return {};
  VectorX<Scalar> out(hi - lo + 1);
  for (Index j = lo; j <= hi; ++j) out[j - lo] = c[2 * j];
  return FinSeq<Scalar>(lo, std::move(out));
}

template <typename Scalar>
PeriodicSeq<Scalar> downsample2(const PeriodicSeq<Scalar>& c) {
  if (c.period() % 2 != 0)
    throw Error(ErrorCode::OddPeriod, "downsampling needs an even period, got " +
                                          std::to_string(c.period()));
  VectorX<Scalar> out(c.period() / 2);
  for (Index j = 0; j < out.size(); ++j) out[j] = c.values()[2 * j];
  return PeriodicSeq<Scalar>(std::move(out));
}

// ---------------------------------------------------------------------------
// Pointwise arithmetic (pyramid residuals need these)

template <typename Scalar>
FinSeq<Scalar> axpby(Scalar a, const FinSeq<Scalar>& x, Scalar b, const FinSeq<Scalar>& y) {
  if (x.empty() && y.empty()) return {};
  const Index lo = x.empty() ? y.first() : (y.empty() ? x.first() : std::min(x.first(), y.first()));
  const Index hi = x.empty() ? y.last() : (y.empty() ? x.last() : std::max(x.last(), y.last()));
  VectorX<Scalar> out = VectorX<Scalar>::Zero(hi - lo + 1);
  if (!x.empty()) out.segment(x.first() - lo, x.size()) += a * x.coeffs();
  if (!y.empty()) out.segment(y.first() - lo, y.size()) += b * y.coeffs();
  return FinSeq<Scalar>(lo, std::move(out));
}

template <typename Scalar>
PeriodicSeq<Scalar> axpby(Scalar a, const PeriodicSeq<Scalar>& x, Scalar b,
                          const PeriodicSeq<Scalar>& y) {
  if (x.period() != y.period())
    throw Error(ErrorCode::ShapeMismatch, "periods " + std::to_string(x.period()) + " and " +
                                              std::to_string(y.period()));
  return PeriodicSeq<Scalar>((a * x.values() + b * y.values()).eval());
}

template <Sequence Seq>
Seq operator+(const Seq& x, const Seq& y) {
  using S = typename Seq::value_type;
  return axpby(S(1), x, S(1), y);
}

template <Sequence Seq>
Seq operator-(const Seq& x, const Seq& y) {
  using S = typename Seq::value_type;
  return axpby(S(1), x, S(-1), y);
}

template <Sequence Seq>
Seq operator*(typename Seq::value_type a, const Seq& x) {
  using S = typename Seq::value_type;
  return axpby(a, x, S(0), x);
}

// ---------------------------------------------------------------------------
// Norms and difference functionals

template <typename Scalar>
Scalar norm_l1(const FinSeq<Scalar>& c) {
  return c.coeffs().template lpNorm<1>();
}

template <typename Scalar>
Scalar norm_l1(const PeriodicSeq<Scalar>& c) {
  return c.values().template lpNorm<1>();
}

template <typename Scalar>
Scalar norm_inf(const FinSeq<Scalar>& c) {
  return c.empty() ? Scalar(0) : c.coeffs().template lpNorm<Eigen::Infinity>();
}

template <typename Scalar>
Scalar norm_inf(const PeriodicSeq<Scalar>& c) {
  return c.values().template lpNorm<Eigen::Infinity>();
}

/// sup_j |c_{j+1} - c_j|, with implicit zeros outside the support.
template <typename Scalar>
Scalar max_abs_diff(const FinSeq<Scalar>& c) {
  using std::abs;
  Scalar m(0);
  for (Index j = c.first() - 1; j <= c.last() && !c.empty(); ++j)
    m = std::max(m, Scalar(abs(c[j + 1] - c[j])));
  return m;
}

/// sup_j |c_{j+1} - c_j| with wrap-around differences.
template <typename Scalar>
Scalar max_abs_diff(const PeriodicSeq<Scalar>& c) {
  using std::abs;
  Scalar m(0);
  for (Index j = 0; j < c.period(); ++j) m = std::max(m, Scalar(abs(c[j + 1] - c[j])));
  return m;
}

/// K_c = 2 sum_i |c_i| |i|, in the sequence's own index frame.
template <typename Scalar>
Scalar k_const(const FinSeq<Scalar>& c) {
  using std::abs;
  Scalar k(0);
  for (Index i = 0; i < c.size(); ++i)
    k += abs(c.coeffs()[i]) * Scalar(abs(c.offset() + i));
  return Scalar(2) * k;
}

}  // namespace nsp
