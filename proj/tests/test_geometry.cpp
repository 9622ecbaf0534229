#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "nsp/geometry.hpp"

using nsp::Index;
using nsp::PlanarCurve;
using nsp::Point2;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

Eigen::VectorXd finest_norms(const PlanarCurve& c, int J) {
  return nsp::pointwise_norms(nsp::circle_pyramid(c, J).details.back());
}

Index cyclic_distance(Index a, Index b, Index n) {
  const Index d = ((a - b) % n + n) % n;
  return std::min(d, n - d);
}

}  // namespace

TEST_CASE("sample_circle") {
  const auto c = nsp::sample_circle(8, 2.0, Point2(1.0, -1.0));
  CHECK(c.size() == 8);
  CHECK(c.closed);
  CHECK(c.points(0, 0) == doctest::Approx(3.0));
  CHECK(c.points(0, 1) == doctest::Approx(-1.0));
  CHECK(c.points(2, 0) == doctest::Approx(1.0));
  CHECK(c.points(2, 1) == doctest::Approx(1.0));
  CHECK(nsp::radial_deviation(c, 2.0, Point2(1.0, -1.0)) <= 1e-15);

  CHECK_THROWS_AS(nsp::sample_circle(3, 1.0), nsp::Error);
  CHECK_THROWS_AS(nsp::sample_circle(16, 0.0), nsp::Error);
  CHECK_THROWS_AS(nsp::sample_circle(16, -1.0), nsp::Error);
}

TEST_CASE("components round trip") {
  const auto c = nsp::sample_circle(32, 1.5);
  const auto back = nsp::curve_from_components(nsp::components(c));
  CHECK(back.points == c.points);
  PlanarCurve open = c;
  open.closed = false;
  CHECK_THROWS_AS(nsp::components(open), nsp::Error);
}

TEST_CASE("perturb_wavy") {
  const auto c = nsp::sample_circle(128, 1.0);
  CHECK(nsp::perturb_wavy(c, 0.0, 5).points == c.points);

  const auto w = nsp::perturb_wavy(c, 0.02, 12);
  const Eigen::VectorXd r = w.points.rowwise().norm();
  CHECK(r.maxCoeff() <= 1.02 + 1e-12);
  CHECK(r.minCoeff() >= 0.98 - 1e-12);
  CHECK(r.maxCoeff() >= 1.02 - 1e-3);
  CHECK(nsp::radial_deviation(w, 1.0) == doctest::Approx(0.02).epsilon(1e-3));
  CHECK_THROWS_AS(nsp::perturb_wavy(c, 0.1, 0), nsp::Error);
}

TEST_CASE("perturb_quadrant only moves points on the arc") {
  const Index N = 256;
  const auto c = nsp::sample_circle(N, 1.0);
  const auto q = nsp::perturb_quadrant(c, 0.05, 24);
  const auto inside = nsp::arc_indices(N, 1.5 * kPi, 0.25 * kPi);
  const std::set<Index> in(inside.begin(), inside.end());
  CHECK(inside.size() == 63);
  CHECK(inside.front() == 161);
  CHECK(inside.back() == 223);

  Index moved = 0;
  for (Index j = 0; j < N; ++j) {
    const double d = (q.points.row(j) - c.points.row(j)).norm();
    if (!in.count(j)) CHECK(d == 0.0);
    if (d > 0.0) ++moved;
  }
  CHECK(moved > 50);
  CHECK(nsp::radial_deviation(q, 1.0) <= 0.05 + 1e-12);
}

TEST_CASE("arc perturbation details stay on the arc") {
  const Index N = 256;
  const int J = 4;
  const auto q = nsp::perturb_quadrant(nsp::sample_circle(N, 1.0), 0.05, 24);
  const auto norms = finest_norms(q, J);
  const auto inside = nsp::arc_indices(N, 1.5 * kPi, 0.25 * kPi);

  const Index margin = 12;
  double outside = 0.0;
  for (Index j = 0; j < N; ++j) {
    Index dist = N;
    for (Index i : inside) dist = std::min(dist, cyclic_distance(i, j, N));
    if (dist > margin) outside = std::max(outside, norms[j]);
  }
  CHECK(outside <= 1e-8);
  CHECK(norms.maxCoeff() >= 1e3 * std::max(outside, 1e-300));
}

TEST_CASE("circularity of exact circles") {
  for (double R : {1.0, 5.0}) {
    const auto r = nsp::circularity_report(nsp::sample_circle(256, R), 4);
    CHECK(r.levels == 4);
    CHECK(r.per_level_l1.size() == 4);
    CHECK(r.per_level_avg_l2.size() == 4);
    CHECK(r.verdict_scale <= (R == 1.0 ? 1e-8 : 1e-7));
  }
  const auto p = nsp::circle_pyramid(nsp::sample_circle(256, 1.0), 4);
  CHECK(p.coarse.front().period() == 16);
  CHECK_THROWS_AS(nsp::circle_pyramid(nsp::sample_circle(100, 1.0), 4), nsp::Error);
}

TEST_CASE("circularity verdict grows with the perturbation amplitude") {
  const auto c = nsp::sample_circle(256, 1.0);
  const double base = nsp::circularity_report(c, 4).verdict_scale;
  double prev = base;
  for (double a : {0.001, 0.003, 0.01, 0.03, 0.1}) {
    const double v = nsp::circularity_report(nsp::perturb_wavy(c, a, 6), 4).verdict_scale;
    CHECK(v > prev);
    prev = v;
  }
  CHECK(prev > 1e6 * std::max(base, 1e-300));
}

TEST_CASE("anomaly localization") {
  const Index N = 256;
  const int J = 4;
  const auto c = nsp::sample_circle(N, 1.0);
  CHECK(nsp::anomaly_localize(c, J).empty());

  const auto ranges = nsp::anomaly_localize(nsp::perturb_quadrant(c, 0.05, 24), J);
  REQUIRE(ranges.size() == 1);
  CHECK(ranges[0].first >= 161 - 2);
  CHECK(ranges[0].first <= 161 + 2);
  CHECK(ranges[0].last >= 223 - 2);
  CHECK(ranges[0].last <= 223 + 2);
  CHECK(ranges[0].angle_first == doctest::Approx(kTwoPi * double(ranges[0].first) / double(N)));

  const auto two = nsp::perturb_arc(nsp::perturb_arc(c, 0.05, 24, 0.5 * kPi, 0.2), 0.05, 24,
                                    kPi, 0.2);
  const auto r2 = nsp::anomaly_localize(two, J);
  REQUIRE(r2.size() == 2);
  CHECK(r2[0].last < r2[1].first);
}

TEST_CASE("anomaly ranges wrap past index zero") {
  const Index N = 256;
  const auto p = nsp::perturb_arc(nsp::sample_circle(N, 1.0), 0.05, 24, 0.0, 0.25 * kPi);
  const auto r = nsp::anomaly_localize(p, 4);
  REQUIRE(r.size() == 1);
  CHECK(r[0].first > N / 2);
  CHECK(r[0].last >= N);
}

TEST_CASE("details rotate with the curve and ignore translation") {
  const int J = 4;
  const auto c = nsp::perturb_quadrant(nsp::sample_circle(256, 1.0), 0.05, 24);
  const auto base = nsp::circle_pyramid(c, J).details;

  const double a = 0.7;
  Eigen::Matrix2d rot;
  rot << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  PlanarCurve rc = c;
  rc.points = (c.points * rot.transpose()).eval();
  const auto rd = nsp::circle_pyramid(rc, J).details;

  PlanarCurve tc = c;
  tc.points.rowwise() += Eigen::RowVector2d(3.0, -2.0);
  const auto td = nsp::circle_pyramid(tc, J).details;

  double rot_err = 0.0, trans_err = 0.0;
  for (std::size_t l = 0; l < base.size(); ++l) {
    const auto& x = base[l][0].values();
    const auto& y = base[l][1].values();
    const Eigen::VectorXd ex = rot(0, 0) * x + rot(0, 1) * y - rd[l][0].values();
    const Eigen::VectorXd ey = rot(1, 0) * x + rot(1, 1) * y - rd[l][1].values();
    rot_err = std::max({rot_err, ex.cwiseAbs().maxCoeff(), ey.cwiseAbs().maxCoeff()});
    trans_err = std::max({trans_err, (td[l][0].values() - x).cwiseAbs().maxCoeff(),
                          (td[l][1].values() - y).cwiseAbs().maxCoeff()});
  }
  CHECK(rot_err <= 1e-10);
  CHECK(trans_err <= 1e-12);
}

TEST_CASE("a single displaced point gives local details") {
  const Index N = 256;
  const int J = 4;
  for (Index j0 : {Index(0), Index(37), Index(200)}) {
    PlanarCurve c = nsp::sample_circle(N, 1.0);
    c.points(j0, 0) += 0.01;
    const Eigen::VectorXd norms = finest_norms(c, J);
    double near = 0.0;
    for (Index j = 0; j < N; ++j)
      if (cyclic_distance(j, j0, N) <= 3) near += norms[j] * norms[j];
    CHECK(near >= 0.95 * norms.squaredNorm());
  }
}
