#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "nsp/decimation.hpp"
#include "nsp/geometry.hpp"
#include "nsp/pyramid.hpp"
#include "nsp/svg.hpp"

namespace nspyr {

namespace fs = std::filesystem;
using nsp::Error;
using nsp::ErrorCode;
using nsp::FinSeq;
using nsp::Index;
using nsp::PeriodicSeq;
using nsp::PlanarCurve;
using nsp::io::Json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// NSPYR_LOG: 0/quiet, 1/info (default), 2/debug.
int log_level() {
  const char* env = std::getenv("NSPYR_LOG");
  if (!env) return 1;
  const std::string v = env;
  if (v == "0" || v == "quiet" || v == "off") return 0;
  if (v == "2" || v == "debug") return 2;
  return 1;
}

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err), level_(log_level()) {}
  void info(const std::string& msg) const {
    if (level_ >= 1) err_ << "[nspyr] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level_ >= 2) err_ << "[nspyr:debug] " << msg << '\n';
  }

 private:
  std::ostream& err_;
  int level_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::BadParams, what);
}

void validate(const RunConfig& cfg) {
  require(cfg.levels >= 1, "levels must be >= 1");
  require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, "epsilon must lie in (0, 1)");
  if (cfg.boundary)
    require(*cfg.boundary == "finite" || *cfg.boundary == "periodic",
            "boundary must be finite or periodic");
  require(cfg.coarse >= 1, "coarse must be >= 1");
  require(cfg.threads >= 0, "threads must be >= 0");
}

void write_file(const fs::path& path, const std::string& text, const Logger& log) {
  nsp::io::write_text(path, text);
  log.debug("wrote " + path.string());
}

template <typename F>
std::string to_text(F&& f) {
  std::ostringstream ss;
  f(ss);
  return ss.str();
}

// Runs job(i) for i in [0, n) on a small pool; results land at their index.
template <typename R, typename Job>
std::vector<R> parallel_map(std::size_t n, int threads, Job job) {
  std::vector<R> results(n);
  std::vector<std::exception_ptr> errors(n);
  unsigned workers = threads > 0 ? unsigned(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = unsigned(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        results[i] = job(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

std::vector<nsp::Point2> points_of(const std::vector<PeriodicSeq<double>>& comps) {
  std::vector<nsp::Point2> pts;
  for (Index i = 0; i < comps[0].period(); ++i) pts.emplace_back(comps[0][i], comps[1][i]);
  return pts;
}

std::vector<nsp::Point2> points_of(const std::vector<FinSeq<double>>& comps) {
  std::vector<nsp::Point2> pts;
  const Index lo = std::min(comps[0].first(), comps[1].first());
  const Index hi = std::max(comps[0].last(), comps[1].last());
  for (Index i = lo; i <= hi; ++i) pts.emplace_back(comps[0][i], comps[1][i]);
  return pts;
}

PlanarCurve curve_of(const std::vector<nsp::Point2>& pts, bool closed) {
  PlanarCurve c;
  c.closed = closed;
  c.points.resize(Index(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) c.points.row(Index(i)) = pts[i].transpose();
  return c;
}

std::vector<std::string> level_labels(int J) {
  std::vector<std::string> out;
  for (int l = 1; l <= J; ++l) out.push_back("level " + std::to_string(l));
  return out;
}

void print_stats(std::ostream& out, const std::vector<nsp::LevelStats>& stats) {
  out << "level  linf                     l1                       avg_l2\n";
  for (const auto& s : stats)
    out << s.level << "      " << nsp::io::format_double(s.linf) << "  " << nsp::io::format_double(s.l1)
        << "  " << nsp::io::format_double(s.avg_l2) << '\n';
}

void write_stats_plots(const fs::path& dir, const std::vector<nsp::LevelStats>& stats, int J,
                       const Logger& log) {
  nsp::svg::Series linf{"linf", {}}, l1{"l1", {}}, avg{"avg_l2", {}};
  for (const auto& s : stats) {
    linf.values.push_back(s.linf);
    l1.values.push_back(s.l1);
    avg.values.push_back(s.avg_l2);
  }
  write_file(dir / "detail_norms.svg",
             nsp::svg::bar_chart("Detail norms per level", level_labels(J), {linf, l1, avg}, true), log);
  write_file(dir / "detail_decay.svg",
             nsp::svg::log_line_plot("Detail decay", "level", {linf, l1, avg}), log);
}

// ---------------------------------------------------------------------------
// decompose

template <typename Seq>
void decompose_components(const RunConfig& cfg, std::vector<Seq> comps, bool is_curve,
                          std::ostream& out, const Logger& log) {
  double n_coarse = double(cfg.coarse);
  if constexpr (nsp::is_periodic_seq<Seq>::value)
    n_coarse = double(comps.front().period()) / std::ldexp(1.0, cfg.levels);
  const nsp::SchemeFamily family = make_family(cfg, n_coarse);
  log.info("decomposing " + std::to_string(comps.size()) + " component(s) with " +
           std::string(nsp::family_name(nsp::kind_of(family))) + ", J=" + std::to_string(cfg.levels));
  const auto p = nsp::analyze(std::move(comps), family, cfg.levels, cfg.epsilon);
  const auto stats = nsp::detail_decay_report(p);

  const fs::path dir = cfg.out;
  write_file(dir / "pyramid.json", nsp::io::to_json(p).dump(1) + "\n", log);
  write_file(dir / "detail_norms.csv", to_text([&](std::ostream& o) { nsp::io::write_detail_norms_csv(o, stats); }),
             log);
  if (cfg.plot) {
    write_stats_plots(dir, stats, cfg.levels, log);
    if (is_curve) {
      const auto fine = synthesize(p);
      nsp::svg::CurveOverlay fig;
      fig.title = "Input curve and coarse points";
      fig.fine = curve_of(points_of(fine), nsp::is_periodic_seq<Seq>::value);
      fig.coarse = points_of(p.coarse);
      fig.reference_circle = false;
      write_file(dir / "curve.svg", nsp::svg::curve_overlay(fig), log);
    }
  }
  print_stats(out, stats);
}

int cmd_decompose(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  require(!cfg.in.empty(), "--in is required");
  const std::string text = nsp::io::read_text(cfg.in);
  std::istringstream in(text);
  const auto kind = nsp::io::sniff_csv(text);

  if (kind == nsp::io::CsvKind::Curve) {
    const PlanarCurve curve = nsp::io::parse_curve_csv(in);
    require(curve.size() > 0, "input curve is empty");
    const bool periodic = cfg.boundary ? *cfg.boundary == "periodic" : curve.closed;
    if (periodic) {
      std::vector<PeriodicSeq<double>> comps{PeriodicSeq<double>(curve.points.col(0).eval()),
                                             PeriodicSeq<double>(curve.points.col(1).eval())};
      decompose_components(cfg, std::move(comps), true, out, log);
    } else {
      std::vector<FinSeq<double>> comps{FinSeq<double>(0, curve.points.col(0).eval()),
                                        FinSeq<double>(0, curve.points.col(1).eval())};
      decompose_components(cfg, std::move(comps), true, out, log);
    }
    return kExitOk;
  }

  const bool file_periodic = kind == nsp::io::CsvKind::PeriodicSequence;
  const bool periodic = cfg.boundary ? *cfg.boundary == "periodic" : file_periodic;
  if (file_periodic) {
    const auto c = nsp::io::parse_periodic_csv(in);
    if (periodic)
      decompose_components(cfg, std::vector{c}, false, out, log);
    else
      decompose_components(cfg, std::vector{FinSeq<double>(0, c.values())}, false, out, log);
  } else {
    const auto c = nsp::io::parse_fin_seq_csv(in);
    if (periodic) {
      require(!c.empty(), "cannot treat an empty sequence as periodic");
      log.info("treating indices " + std::to_string(c.first()) + ".." + std::to_string(c.last()) +
               " as one period");
      decompose_components(cfg, std::vector{PeriodicSeq<double>(c.coeffs())}, false, out, log);
    } else {
      decompose_components(cfg, std::vector{c}, false, out, log);
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reconstruct

template <typename Seq>
void reconstruct_pyramid(const RunConfig& cfg, nsp::Pyramid<Seq> p, std::ostream& out,
                         const Logger& log) {
  if (cfg.detail_scale != 1.0) {
    log.info("scaling details by " + nsp::io::format_double(cfg.detail_scale));
    for (auto& level : p.details)
      for (auto& d : level) d = cfg.detail_scale * d;
  }
  const auto c = nsp::synthesize(p);
  const fs::path dir = cfg.out;
  constexpr bool periodic = nsp::is_periodic_seq<Seq>::value;
  std::string csv;
  if (c.size() == 2) {
    const PlanarCurve curve = curve_of(points_of(c), periodic);
    csv = to_text([&](std::ostream& o) { nsp::io::write_csv(o, curve); });
    if (cfg.plot) {
      nsp::svg::CurveOverlay fig;
      fig.title = "Reconstruction";
      fig.fine = curve;
      fig.coarse = points_of(p.coarse);
      fig.reference_circle = false;
      write_file(dir / "reconstruction.svg", nsp::svg::curve_overlay(fig), log);
    }
  } else if (c.size() == 1) {
    csv = to_text([&](std::ostream& o) { nsp::io::write_csv(o, c.front()); });
  } else {
    throw Error(ErrorCode::ShapeMismatch,
                "cannot write " + std::to_string(c.size()) + " components as CSV");
  }
  write_file(dir / "reconstruction.csv", csv, log);
  out << "reconstructed " << c.size() << " component(s) over " << p.depth() << " level(s)\n";
}

int cmd_reconstruct(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  require(!cfg.in.empty(), "--in is required");
  Json j;
  try {
    j = Json::parse(nsp::io::read_text(cfg.in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  auto any = nsp::io::pyramid_from_json(j);
  std::visit([&](auto& p) { reconstruct_pyramid(cfg, std::move(p), out, log); }, any);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// gamma

int cmd_gamma(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const nsp::SchemeFamily family = make_family(cfg, double(cfg.coarse));
  const int J = cfg.levels;
  log.info("solving filters for levels 1.." + std::to_string(J));
  const auto levels = parallel_map<nsp::PyramidLevel<double>>(std::size_t(J), cfg.threads, [&](std::size_t i) {
    return nsp::detail::make_level<double>(family, int(i) + 1, cfg.epsilon);
  });

  const fs::path dir = cfg.out;
  std::vector<nsp::Mask<double>> masks;
  Json summary;
  summary["family"] = nsp::io::to_json(family);
  summary["epsilon"] = cfg.epsilon;
  summary["levels"] = Json::array();
  std::vector<nsp::svg::Series> series;
  for (int l = 1; l <= J; ++l) {
    const auto& lv = levels[std::size_t(l - 1)];
    masks.push_back(lv.mask);
    const std::string stem = "gamma_level" + std::to_string(l);
    write_file(dir / (stem + ".csv"), to_text([&](std::ostream& o) { nsp::io::write_filter_csv(o, lv.filter); }),
               log);
    Json meta = nsp::io::filter_metadata(lv.filter);
    write_file(dir / (stem + ".json"), meta.dump(1) + "\n", log);
    Json entry;
    entry["level"] = l;
    entry["metadata"] = meta;
    summary["levels"].push_back(std::move(entry));
    out << "level " << l << ": " << lv.filter.zeta.size() << " coefficients, residual "
        << nsp::io::format_double(lv.filter.residual_l1) << ", |zeta|_1 "
        << nsp::io::format_double(nsp::norm_l1(lv.filter.zeta)) << '\n';

    nsp::svg::Series s{"level " + std::to_string(l), {}};
    for (Index i = 0; i < lv.filter.zeta.size(); ++i) s.values.push_back(std::abs(lv.filter.zeta.coeffs()[i]));
    series.push_back(std::move(s));
  }
  write_file(dir / "masks.csv", to_text([&](std::ostream& o) { nsp::io::write_mask_dump(o, masks); }), log);
  write_file(dir / "gamma.json", summary.dump(1) + "\n", log);
  if (cfg.plot)
    write_file(dir / "gamma.svg", nsp::svg::log_line_plot("|zeta_j| per level", "coefficient position", series),
               log);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// circle-demo

struct ShapeResult {
  PlanarCurve curve;
  nsp::Pyramid<PeriodicSeq<double>> pyramid;
  nsp::CircularityReport report;
};

ShapeResult analyze_shape(PlanarCurve curve, int J, double epsilon) {
  ShapeResult r;
  r.pyramid = nsp::circle_pyramid(curve, J, epsilon);
  r.report = nsp::circularity_report(r.pyramid);
  r.curve = std::move(curve);
  return r;
}

nsp::svg::CurveOverlay overlay(const std::string& title, const ShapeResult& s, double R) {
  nsp::svg::CurveOverlay fig;
  fig.title = title;
  fig.fine = s.curve;
  fig.coarse = points_of(s.pyramid.coarse);
  fig.R = R;
  return fig;
}

int cmd_circle_demo(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  require(cfg.radius > 0.0, "radius must be positive");
  require(!cfg.wavy.empty(), "at least one wavy preset is required");
  const fs::path dir = cfg.out;
  const int J = cfg.levels;

  // Nine samples refined three times, conic versus cubic B-spline.
  const PlanarCurve nine = nsp::sample_circle(9, cfg.radius);
  const auto refine_curve = [&](const nsp::SchemeFamily& f) {
    const auto comps = nsp::components(nine);
    return nsp::curve_from_components(
        {nsp::refine_n(f, comps[0], 3), nsp::refine_n(f, comps[1], 3)});
  };
  const PlanarCurve conic9 =
      refine_curve(nsp::ConicFamily{nsp::initial_v(nsp::Trigonometric{kTwoPi / 9.0})});
  const PlanarCurve bspline9 = refine_curve(nsp::StationaryFamily{nsp::cubic_bspline_taps()});
  const double conic_dev = nsp::radial_deviation(conic9, cfg.radius);
  const double bspline_dev = nsp::radial_deviation(bspline9, cfg.radius);
  out << "refinement of 9 samples: conic deviation " << nsp::io::format_double(conic_dev)
      << ", cubic B-spline deviation " << nsp::io::format_double(bspline_dev) << '\n';

  log.info("analyzing circle and " + std::to_string(cfg.wavy.size()) + " wavy presets");
  const PlanarCurve circle = nsp::sample_circle(cfg.samples, cfg.radius);
  const std::size_t n = cfg.wavy.size() + 1;
  const auto shapes = parallel_map<ShapeResult>(n, cfg.threads, [&](std::size_t i) {
    PlanarCurve c = i == 0 ? circle
                           : nsp::perturb_wavy(circle, cfg.wavy[i - 1].amplitude, cfg.wavy[i - 1].frequency);
    return analyze_shape(std::move(c), J, cfg.epsilon);
  });

  Json report;
  report["samples"] = cfg.samples;
  report["radius"] = cfg.radius;
  report["levels"] = J;
  report["epsilon"] = cfg.epsilon;
  report["refinement"] = {{"conic_deviation", conic_dev}, {"bspline_deviation", bspline_dev}};
  report["circle"] = nsp::io::to_json(shapes[0].report);
  report["circle"]["coarse_points"] = shapes[0].pyramid.coarse.front().period();
  Json wavy = Json::array();
  bool ordered = true;
  for (std::size_t i = 1; i < n; ++i) {
    Json w;
    w["amplitude"] = cfg.wavy[i - 1].amplitude;
    w["frequency"] = cfg.wavy[i - 1].frequency;
    w["report"] = nsp::io::to_json(shapes[i].report);
    wavy.push_back(std::move(w));
    if (!(shapes[i].report.verdict_scale > shapes[i - 1].report.verdict_scale)) ordered = false;
  }
  report["wavy"] = std::move(wavy);
  report["ordered"] = ordered;
  write_file(dir / "report.json", report.dump(1) + "\n", log);

  for (std::size_t i = 0; i < n; ++i)
    out << (i == 0 ? std::string("circle") : "wavy " + std::to_string(i)) << ": verdict_scale "
        << nsp::io::format_double(shapes[i].report.verdict_scale) << '\n';

  // Figures.
  {
    nsp::svg::CurveOverlay fig;
    fig.title = "Conic refinement of 9 samples";
    fig.fine = conic9;
    fig.coarse = points_of(nsp::components(nine));
    fig.R = cfg.radius;
    write_file(dir / "refine_conic.svg", nsp::svg::curve_overlay(fig), log);
    fig.title = "Cubic B-spline refinement of 9 samples";
    fig.fine = bspline9;
    write_file(dir / "refine_bspline.svg", nsp::svg::curve_overlay(fig), log);
  }
  write_file(dir / "circle_pyramid.svg", nsp::svg::curve_overlay(overlay("Circle and coarse points", shapes[0], cfg.radius)),
             log);
  std::vector<nsp::svg::Series> l1, avg;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = i == 0 ? "circle" : "wavy " + std::to_string(i);
    if (i > 0)
      write_file(dir / ("wavy_" + std::to_string(i) + ".svg"),
                 nsp::svg::curve_overlay(overlay("Wavy circle " + std::to_string(i), shapes[i], cfg.radius)), log);
    l1.push_back({name, shapes[i].report.per_level_l1});
    avg.push_back({name, shapes[i].report.per_level_avg_l2});
  }
  write_file(dir / "detail_bars.svg",
             nsp::svg::bar_chart("Averaged detail norm per level", level_labels(J), avg, true), log);
  write_file(dir / "decay_l1.svg", nsp::svg::log_line_plot("L1 norm of details", "level", l1), log);
  write_file(dir / "decay_avg_l2.svg", nsp::svg::log_line_plot("Averaged L2 norm of details", "level", avg), log);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// anomaly-demo

int cmd_anomaly_demo(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  require(cfg.radius > 0.0, "radius must be positive");
  const fs::path dir = cfg.out;
  const PlanarCurve curve =
      nsp::perturb_quadrant(nsp::sample_circle(cfg.samples, cfg.radius), cfg.amplitude, cfg.frequency);
  const ShapeResult s = analyze_shape(curve, cfg.levels, cfg.epsilon);
  nsp::AnomalyOptions opts;
  opts.threshold_ratio = cfg.threshold_ratio;
  const auto ranges = nsp::anomaly_localize(s.pyramid, opts);

  const auto injected =
      nsp::arc_indices(cfg.samples, 1.5 * std::numbers::pi, 0.25 * std::numbers::pi);
  std::vector<Index> flagged;
  for (const auto& r : ranges)
    for (Index j = r.first; j <= r.last; ++j) flagged.push_back(j % cfg.samples);
  std::size_t hit = 0;
  for (Index j : flagged)
    if (std::binary_search(injected.begin(), injected.end(), j)) ++hit;
  const double coverage = injected.empty() ? 1.0 : double(hit) / double(injected.size());
  const double spillover = injected.empty() ? 0.0 : double(flagged.size() - hit) / double(injected.size());

  Json report;
  report["samples"] = cfg.samples;
  report["levels"] = cfg.levels;
  report["amplitude"] = cfg.amplitude;
  report["frequency"] = cfg.frequency;
  report["threshold_ratio"] = cfg.threshold_ratio;
  report["ranges"] = nsp::io::to_json(ranges);
  report["injected"] = {{"first", injected.empty() ? 0 : injected.front()},
                        {"last", injected.empty() ? 0 : injected.back()},
                        {"count", injected.size()}};
  report["coverage"] = coverage;
  report["spillover"] = spillover;
  report["circularity"] = nsp::io::to_json(s.report);
  write_file(dir / "report.json", report.dump(1) + "\n", log);

  out << ranges.size() << " flagged range(s)";
  for (const auto& r : ranges) out << " [" << r.first << ", " << r.last << "]";
  out << "; coverage " << nsp::io::format_double(coverage) << ", spillover "
      << nsp::io::format_double(spillover) << '\n';

  auto fig = overlay("Quadrant anomaly", s, cfg.radius);
  fig.highlight = flagged;
  write_file(dir / "anomaly_overlay.svg", nsp::svg::curve_overlay(fig), log);
  const Eigen::VectorXd norms = nsp::pointwise_norms(s.pyramid.details.back());
  write_file(dir / "anomaly_norms.svg",
             nsp::svg::log_line_plot("Finest-level detail norms", "sample index + 1",
                                     {{"|d_j|", std::vector<double>(norms.data(), norms.data() + norms.size())}}),
             log);
  write_file(dir / "detail_bars.svg",
             nsp::svg::bar_chart("Averaged detail norm per level", level_labels(cfg.levels),
                                 {{"anomaly", s.report.per_level_avg_l2}}, true),
             log);
  return kExitOk;
}

template <typename T>
void take(const Json& j, const char* key, T& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

template <typename T>
void take(const Json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key) && !j.at(key).is_null()) dst = j.at(key).get<T>();
}

}  // namespace

void apply_config(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "config must be a JSON object");
  try {
    take(j, "in", cfg.in);
    take(j, "out", cfg.out);
    take(j, "family", cfg.family);
    take(j, "theta", cfg.theta);
    take(j, "hyperbolic", cfg.hyperbolic);
    take(j, "levels", cfg.levels);
    take(j, "epsilon", cfg.epsilon);
    take(j, "boundary", cfg.boundary);
    take(j, "plot", cfg.plot);
    take(j, "samples", cfg.samples);
    take(j, "radius", cfg.radius);
    take(j, "coarse", cfg.coarse);
    take(j, "amplitude", cfg.amplitude);
    take(j, "frequency", cfg.frequency);
    take(j, "threshold_ratio", cfg.threshold_ratio);
    take(j, "detail_scale", cfg.detail_scale);
    take(j, "threads", cfg.threads);
    if (j.contains("wavy")) {
      cfg.wavy.clear();
      for (const auto& w : j.at("wavy"))
        cfg.wavy.push_back({w.at("amplitude").get<double>(), w.at("frequency").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
  }
}

nsp::SchemeFamily make_family(const RunConfig& cfg, double n_coarse) {
  const std::string& f = cfg.family;
  if (f.rfind("stationary:", 0) == 0) {
    const std::string src = f.substr(11);
    if (src == "bspline3") return nsp::StationaryFamily{nsp::cubic_bspline_taps()};
    if (src == "dd4") return nsp::StationaryFamily{nsp::four_point_taps()};
    std::istringstream in(nsp::io::read_text(src));
    return nsp::StationaryFamily{nsp::io::parse_fin_seq_csv(in)};
  }
  const double theta = cfg.theta ? *cfg.theta : kTwoPi / n_coarse;
  if (f == "ns4pt") return nsp::NS4PointFamily{theta};
  const double v = cfg.hyperbolic ? nsp::initial_v(nsp::Hyperbolic{theta})
                                  : nsp::initial_v(nsp::Trigonometric{theta});
  if (f == "nscubic") return nsp::NSCubicFamily{v};
  if (f == "conic") return nsp::ConicFamily{v};
  throw Error(ErrorCode::BadParams, "unknown family '" + f + "'");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Logger log(err);
  try {
    validate(cfg);
    if (cfg.command == "decompose") return cmd_decompose(cfg, out, log);
    if (cfg.command == "reconstruct") return cmd_reconstruct(cfg, out, log);
    if (cfg.command == "gamma") return cmd_gamma(cfg, out, log);
    if (cfg.command == "circle-demo") return cmd_circle_demo(cfg, out, log);
    if (cfg.command == "anomaly-demo") return cmd_anomaly_demo(cfg, out, log);
    err << "error: unknown command '" << cfg.command << "'\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: parse error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonstationary subdivision pyramids", "nspyr"};
  app.require_subcommand(1);

  struct Flags {
    std::optional<std::string> config, in, out, family, boundary;
    std::optional<double> theta, epsilon, radius, amplitude, threshold_ratio, detail_scale;
    std::optional<int> levels, frequency, threads;
    std::optional<Index> samples, coarse;
    bool plot = false, hyperbolic = false, zero_details = false;
  } flags;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON config file (flags take precedence)");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--levels,-J", flags.levels, "Number of pyramid levels J");
    sub->add_option("--epsilon", flags.epsilon, "Truncation threshold for decimation filters");
    sub->add_option("--threads", flags.threads, "Worker threads for sweeps (0 = all cores)");
  };
  auto family_opts = [&](CLI::App* sub) {
    sub->add_option("--family", flags.family, "ns4pt | nscubic | conic | stationary:<file|bspline3|dd4>");
    sub->add_option("--theta", flags.theta,
                    "Spacing angle at the coarsest level; default 2*pi/N0 with N0 the coarse count");
    sub->add_flag("--hyperbolic", flags.hyperbolic, "Use cosh(theta) instead of cos(theta) for v");
    sub->add_option("--coarse", flags.coarse, "N0 for deriving theta when the data are not periodic");
  };
  auto curve_opts = [&](CLI::App* sub) {
    sub->add_option("--samples", flags.samples, "Samples on the circle");
    sub->add_option("--radius", flags.radius, "Circle radius");
  };

  auto* decompose = app.add_subcommand("decompose", "Analyze a sequence or curve CSV into a pyramid");
  common(decompose);
  family_opts(decompose);
  decompose->add_option("--in", flags.in, "Input CSV");
  decompose->add_option("--boundary", flags.boundary, "finite | periodic (default: from input)");
  decompose->add_flag("--plot", flags.plot, "Write SVG plots");

  auto* reconstruct = app.add_subcommand("reconstruct", "Synthesize a pyramid JSON back to CSV");
  common(reconstruct);
  reconstruct->add_option("--in", flags.in, "Pyramid JSON");
  reconstruct->add_option("--detail-scale", flags.detail_scale, "Multiply every detail before synthesis");
  reconstruct->add_flag("--zero-details", flags.zero_details, "Drop all details (same as --detail-scale 0)");
  reconstruct->add_flag("--plot", flags.plot, "Write SVG plots");

  auto* gamma = app.add_subcommand("gamma", "Export decimation filters for levels 1..J");
  common(gamma);
  family_opts(gamma);
  gamma->add_flag("--plot", flags.plot, "Write SVG plots");

  auto* circle = app.add_subcommand("circle-demo", "Circle reproduction and circularity of wavy circles");
  common(circle);
  curve_opts(circle);

  auto* anomaly = app.add_subcommand("anomaly-demo", "Localize a perturbed quadrant on a circle");
  common(anomaly);
  curve_opts(anomaly);
  anomaly->add_option("--amplitude", flags.amplitude, "Perturbation amplitude");
  anomaly->add_option("--frequency", flags.frequency, "Perturbation frequency");
  anomaly->add_option("--threshold-ratio", flags.threshold_ratio, "Multiple of the median detail norm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command == "circle-demo") cfg.out = "circle_demo_out";
  if (cfg.command == "anomaly-demo") cfg.out = "anomaly_demo_out";
  if (flags.config) {
    try {
      Json j;
      try {
        j = Json::parse(nsp::io::read_text(*flags.config));
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("config: ") + e.what());
      }
      apply_config(cfg, j);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kExitIo;
    }
  }
  if (flags.in) cfg.in = *flags.in;
  if (flags.out) cfg.out = *flags.out;
  if (flags.family) cfg.family = *flags.family;
  if (flags.boundary) cfg.boundary = *flags.boundary;
  if (flags.theta) cfg.theta = *flags.theta;
  if (flags.epsilon) cfg.epsilon = *flags.epsilon;
  if (flags.radius) cfg.radius = *flags.radius;
  if (flags.amplitude) cfg.amplitude = *flags.amplitude;
  if (flags.threshold_ratio) cfg.threshold_ratio = *flags.threshold_ratio;
  if (flags.detail_scale) cfg.detail_scale = *flags.detail_scale;
  if (flags.levels) cfg.levels = *flags.levels;
  if (flags.frequency) cfg.frequency = *flags.frequency;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.samples) cfg.samples = *flags.samples;
  if (flags.coarse) cfg.coarse = *flags.coarse;
  if (flags.plot) cfg.plot = true;
  if (flags.hyperbolic) cfg.hyperbolic = true;
  if (flags.zero_details) cfg.detail_scale = 0.0;
  return run(cfg, out, err);
}

}  // namespace nspyr
