#include "nsp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nsp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_closed(const PlanarCurve& curve) {
  if (!curve.closed) throw Error(ErrorCode::BadParams, "curve must be closed");
  if (curve.size() < 4) throw Error(ErrorCode::BadParams, "curve needs at least 4 points");
}

Point2 centroid(const PlanarCurve& curve) { return curve.points.colwise().mean().transpose(); }

template <typename Offset>
PlanarCurve radial_offset(const PlanarCurve& curve, Offset offset) {
  const Point2 c = centroid(curve);
  PlanarCurve out = curve;
  const Index n = curve.size();
  for (Index j = 0; j < n; ++j) {
    const double dr = offset(j, n);
    if (dr == 0.0) continue;
    const Point2 rel = curve.points.row(j).transpose() - c;
    const double r = rel.norm();
    if (r == 0.0) throw Error(ErrorCode::BadParams, "point coincides with the centroid");
    out.points.row(j) = (c + rel * ((r + dr) / r)).transpose();
  }
  return out;
}

// Raised cosine on (-1, 1), zero outside. The open-interval test leaves a
// little room so arc endpoints that land on a sample are excluded reliably.
double bump(double t) {
  if (!(std::abs(t) < 1.0 - 1e-12)) return 0.0;
  return 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

}  // namespace

std::vector<PeriodicSeq<double>> components(const PlanarCurve& curve) {
  require_closed(curve);
  return {PeriodicSeq<double>(curve.points.col(0).eval()),
          PeriodicSeq<double>(curve.points.col(1).eval())};
}

PlanarCurve curve_from_components(const std::vector<PeriodicSeq<double>>& comps) {
  if (comps.size() != 2 || comps[0].period() != comps[1].period())
    throw Error(ErrorCode::ShapeMismatch, "expected two components of equal period");
  PlanarCurve c;
  c.points.resize(comps[0].period(), 2);
  c.points.col(0) = comps[0].values();
  c.points.col(1) = comps[1].values();
  c.closed = true;
  return c;
}

PlanarCurve sample_circle(Index N, double R, const Point2& center) {
  if (N < 4 || !(R > 0.0))
    throw Error(ErrorCode::BadParams, "need N >= 4 and R > 0");
  PlanarCurve c;
  c.points.resize(N, 2);
  for (Index j = 0; j < N; ++j) {
    const double t = kTwoPi * double(j) / double(N);
    c.points(j, 0) = center.x() + R * std::cos(t);
    c.points(j, 1) = center.y() + R * std::sin(t);
  }
  c.closed = true;
  return c;
}

PlanarCurve perturb_wavy(const PlanarCurve& curve, double amplitude, int frequency) {
  if (frequency < 1) throw Error(ErrorCode::BadParams, "frequency must be >= 1");
  if (amplitude == 0.0) return curve;
  return radial_offset(curve, [&](Index j, Index n) {
    return amplitude * std::sin(frequency * kTwoPi * double(j) / double(n));
  });
}

PlanarCurve perturb_arc(const PlanarCurve& curve, double amplitude, int frequency,
                        double center_angle, double half_width) {
  if (frequency < 1) throw Error(ErrorCode::BadParams, "frequency must be >= 1");
  if (!(half_width > 0.0)) throw Error(ErrorCode::BadParams, "arc half width must be positive");
  if (amplitude == 0.0) return curve;
  return radial_offset(curve, [&](Index j, Index n) {
    const double phi = kTwoPi * double(j) / double(n);
    // Signed angular distance to the arc center, in (-pi, pi].
    double delta = std::remainder(phi - center_angle, kTwoPi);
    return amplitude * std::sin(frequency * phi) * bump(delta / half_width);
  });
}

PlanarCurve perturb_quadrant(const PlanarCurve& curve, double amplitude, int frequency) {
  return perturb_arc(curve, amplitude, frequency, 1.5 * std::numbers::pi, 0.25 * std::numbers::pi);
}

std::vector<Index> arc_indices(Index N, double center_angle, double half_width) {
  std::vector<Index> out;
  for (Index j = 0; j < N; ++j) {
    const double phi = kTwoPi * double(j) / double(N);
    if (bump(std::remainder(phi - center_angle, kTwoPi) / half_width) > 0.0) out.push_back(j);
  }
  return out;
}

double radial_deviation(const PlanarCurve& curve, double R, const Point2& center) {
  const Eigen::VectorXd r = (curve.points.rowwise() - center.transpose()).rowwise().norm();
  return (r.array() - R).abs().maxCoeff();
}

SchemeFamily circle_family(Index N, int J) {
  if (J < 0 || N % (Index(1) << J) != 0)
    throw Error(ErrorCode::PeriodNotDivisible,
                "period " + std::to_string(N) + " is not divisible by 2^" + std::to_string(J));
  const Index coarse = N >> J;
  return ConicFamily{initial_v(Trigonometric{kTwoPi / double(coarse)})};
}

Pyramid<PeriodicSeq<double>> circle_pyramid(const PlanarCurve& curve, int J, double epsilon) {
  require_closed(curve);
  return analyze(components(curve), circle_family(curve.size(), J), J, epsilon);
}

CircularityReport circularity_report(const Pyramid<PeriodicSeq<double>>& p) {
  CircularityReport r;
  r.levels = p.depth();
  for (const auto& s : detail_decay_report(p)) {
    r.per_level_l1.push_back(s.l1);
    r.per_level_avg_l2.push_back(s.avg_l2);
    r.verdict_scale = std::max(r.verdict_scale, s.avg_l2);
  }
  return r;
}

CircularityReport circularity_report(const PlanarCurve& curve, int J, double epsilon) {
  return circularity_report(circle_pyramid(curve, J, epsilon));
}

std::vector<AnomalyRange> anomaly_localize(const Pyramid<PeriodicSeq<double>>& p,
                                           const AnomalyOptions& opts) {
  if (p.depth() < 1) return {};
  const Eigen::VectorXd norms = pointwise_norms(p.details.back());
  const Index n = norms.size();

  std::vector<double> sorted(norms.data(), norms.data() + n);
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  double median = sorted[std::size_t(n / 2)];
  if (n % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + n / 2);
    median = 0.5 * (median + lower);
  }
  const double threshold = std::max({opts.threshold_ratio * median, opts.absolute_floor,
                                     opts.peak_fraction * norms.maxCoeff()});

  std::vector<AnomalyRange> ranges;
  for (Index j = 0; j < n; ++j) {
    if (!(norms[j] > threshold)) continue;
    if (!ranges.empty() && j - ranges.back().last <= opts.merge_gap)
      ranges.back().last = j;
    else
      ranges.push_back({j, j});
  }
  // Join a range touching the end with one touching the start.
  if (ranges.size() > 1 && ranges.front().first + n - ranges.back().last <= opts.merge_gap) {
    ranges.back().last = ranges.front().last + n;
    ranges.erase(ranges.begin());
  }
  const double step = kTwoPi / double(n);
  for (auto& r : ranges) {
    r.angle_first = step * double(r.first);
    r.angle_last = step * double(r.last);
  }
  return ranges;
}

std::vector<AnomalyRange> anomaly_localize(const PlanarCurve& curve, int J, double epsilon,
                                           const AnomalyOptions& opts) {
  return anomaly_localize(circle_pyramid(curve, J, epsilon), opts);
}

}  // namespace nsp
