#pragma once

// Planar curve generation, perturbation, circularity scoring and anomaly
// localization on top of the conic-reproducing pyramid.

#include <Eigen/Core>

#include <vector>

#include "nsp/pyramid.hpp"
#include "nsp/sequence.hpp"
#include "nsp/subdivision.hpp"

namespace nsp {

using Point2 = Eigen::Vector2d;
using Points2 = Eigen::Matrix<double, Eigen::Dynamic, 2>;

struct PlanarCurve {
  Points2 points;
  bool closed = true;

  Index size() const { return points.rows(); }
};

/// x and y as periodic sequences; the curve must be closed.
std::vector<PeriodicSeq<double>> components(const PlanarCurve& curve);
PlanarCurve curve_from_components(const std::vector<PeriodicSeq<double>>& comps);

/// center + R (cos(2 pi j / N), sin(2 pi j / N)), j = 0..N-1.
PlanarCurve sample_circle(Index N, double R, const Point2& center = Point2::Zero());

/// Radial offset r_j -> r_j + amplitude sin(frequency 2 pi j / N) about the
/// centroid.
PlanarCurve perturb_wavy(const PlanarCurve& curve, double amplitude, int frequency);

/// Radial offset amplitude sin(frequency phi) w(phi) on the parameter arc
/// (center_angle - half_width, center_angle + half_width), phi = 2 pi j / N,
/// w a raised-cosine bump vanishing with its derivative at the arc ends.
PlanarCurve perturb_arc(const PlanarCurve& curve, double amplitude, int frequency,
                        double center_angle, double half_width);

/// perturb_arc on the lower right quadrant, 3pi/2 +- pi/4.
PlanarCurve perturb_quadrant(const PlanarCurve& curve, double amplitude, int frequency);

/// Indices j whose parameter angle lies strictly inside the arc.
std::vector<Index> arc_indices(Index N, double center_angle, double half_width);

/// max_j | ||p_j - center|| - R |.
double radial_deviation(const PlanarCurve& curve, double R, const Point2& center = Point2::Zero());

/// Conic family tuned to a closed curve of N samples analyzed over J levels:
/// trigonometric class with sigma = 2 pi / (N / 2^J).
SchemeFamily circle_family(Index N, int J);

/// Conic-family pyramid of a closed curve.
Pyramid<PeriodicSeq<double>> circle_pyramid(const PlanarCurve& curve, int J,
                                            double epsilon = kDefaultEpsilon);

struct CircularityReport {
  int levels = 0;
  std::vector<double> per_level_l1;      ///< sum_j ||d_j||, level 1..J
  std::vector<double> per_level_avg_l2;  ///< mean_j ||d_j||, level 1..J
  double verdict_scale = 0.0;            ///< max over levels of avg_l2
};

CircularityReport circularity_report(const PlanarCurve& curve, int J,
                                     double epsilon = kDefaultEpsilon);
CircularityReport circularity_report(const Pyramid<PeriodicSeq<double>>& p);

struct AnomalyOptions {
  double threshold_ratio = 50.0;  ///< multiple of the median norm
  double absolute_floor = 1e-10;
  double peak_fraction = 0.025;   ///< fraction of the largest norm
  Index merge_gap = 2;            ///< flags at most this far apart share a range
};

struct AnomalyRange {
  Index first = 0;  ///< fine-level index
  Index last = 0;   ///< may exceed N-1 for a range wrapping past index 0
  double angle_first = 0.0;
  double angle_last = 0.0;

  Index length() const { return last - first + 1; }
};

/// Flags finest-level detail indices whose Euclidean norm exceeds
/// max(threshold_ratio * median, absolute_floor, peak_fraction * peak) and
/// merges nearby flags into cyclic index ranges.
std::vector<AnomalyRange> anomaly_localize(const Pyramid<PeriodicSeq<double>>& p,
                                           const AnomalyOptions& opts = {});
std::vector<AnomalyRange> anomaly_localize(const PlanarCurve& curve, int J,
                                           double epsilon = kDefaultEpsilon,
                                           const AnomalyOptions& opts = {});

}  // namespace nsp
