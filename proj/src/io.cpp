#include "nsp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nsp::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(trim(field));
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, std::size_t line_no) {
  long long v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e)
    throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + ": bad integer '" + s + "'");
  return v;
}

// Calls row(fields, line_no) for every non-empty, non-comment line and
// header(text) for `# key=value` lines.
template <typename Header, typename Row>
void scan_csv(std::istream& in, Header header, Row row) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      header(trim(t.substr(1)), line_no);
      continue;
    }
    row(split(t, ','), line_no);
  }
}

Json json_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double number_or_nan(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json values_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd values_from_json(const Json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::Parse, "expected an array of numbers");
  Eigen::VectorXd v(Index(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[Index(i)] = arr[i].get<double>();
  return v;
}

Json seq_json(const FinSeq<double>& c) {
  Json j;
  j["offset"] = c.offset();
  j["values"] = values_json(c.coeffs());
  return j;
}

Json seq_json(const PeriodicSeq<double>& c) { return values_json(c.values()); }

template <typename Seq>
Seq seq_from_json(const Json& j);

template <>
FinSeq<double> seq_from_json<FinSeq<double>>(const Json& j) {
  return FinSeq<double>(j.at("offset").get<Index>(), values_from_json(j.at("values")));
}

template <>
PeriodicSeq<double> seq_from_json<PeriodicSeq<double>>(const Json& j) {
  return PeriodicSeq<double>(values_from_json(j));
}

Json level_json(const PyramidLevel<double>& lv, int level) {
  Json j;
  j["level"] = level;
  j["mask_level"] = lv.mask.level;
  j["parameter"] = json_number(lv.mask.parameter);
  j["mask"] = seq_json(lv.mask.taps);
  Json f = filter_metadata(lv.filter);
  f["offset"] = lv.filter.zeta.offset();
  f["zeta"] = values_json(lv.filter.zeta.coeffs());
  f["gamma_raw"] = values_json(lv.filter.gamma_raw.coeffs());
  j["filter"] = std::move(f);
  return j;
}

PyramidLevel<double> level_from_json(const Json& j, FamilyKind kind) {
  PyramidLevel<double> lv;
  lv.mask.taps = seq_from_json<FinSeq<double>>(j.at("mask"));
  lv.mask.level = j.at("mask_level").get<int>();
  lv.mask.family = kind;
  lv.mask.parameter = number_or_nan(j.at("parameter"));
  const Json& f = j.at("filter");
  const Index off = f.at("offset").get<Index>();
  lv.filter.zeta = FinSeq<double>(off, values_from_json(f.at("zeta")));
  lv.filter.gamma_raw = FinSeq<double>(off, values_from_json(f.at("gamma_raw")));
  lv.filter.epsilon = f.at("epsilon").get<double>();
  lv.filter.residual_l1 = f.at("residual_l1").get<double>();
  lv.filter.window = f.value("window", Index(0));
  lv.filter.source_mask_level = lv.mask.level;
  if (!f.at("decay_C").is_null() && !f.at("decay_lambda").is_null())
    lv.filter.decay = DecayFit{f["decay_C"].get<double>(), f["decay_lambda"].get<double>()};
  return lv;
}

template <typename Seq>
Json pyramid_json(const Pyramid<Seq>& p) {
  Json j;
  j["family"] = to_json(p.family);
  j["epsilon"] = p.epsilon;
  j["boundary"] = Pyramid<Seq>::boundary == Boundary::Periodic ? "periodic" : "finite";
  j["components"] = p.components();
  Json coarse = Json::array();
  for (const auto& c : p.coarse) coarse.push_back(seq_json(c));
  j["coarse"] = std::move(coarse);
  Json details = Json::array();
  for (const auto& level : p.details) {
    Json comps = Json::array();
    for (const auto& d : level) comps.push_back(seq_json(d));
    details.push_back(std::move(comps));
  }
  j["details"] = std::move(details);
  Json levels = Json::array();
  for (std::size_t l = 0; l < p.levels.size(); ++l) levels.push_back(level_json(p.levels[l], int(l + 1)));
  j["level_params"] = std::move(levels);
  return j;
}

template <typename Seq>
Pyramid<Seq> pyramid_from(const Json& j) {
  Pyramid<Seq> p;
  p.family = family_from_json(j.at("family"));
  p.epsilon = j.at("epsilon").get<double>();
  for (const auto& c : j.at("coarse")) p.coarse.push_back(seq_from_json<Seq>(c));
  for (const auto& level : j.at("details")) {
    std::vector<Seq> comps;
    for (const auto& d : level) comps.push_back(seq_from_json<Seq>(d));
    p.details.push_back(std::move(comps));
  }
  for (const auto& lv : j.at("level_params"))
    p.levels.push_back(level_from_json(lv, kind_of(p.family)));
  return p;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FinSeq<double> parse_fin_seq_csv(std::istream& in) {
  std::vector<std::pair<long long, double>> rows;
  scan_csv(
      in, [](const std::string&, std::size_t) {},
      [&](const std::vector<std::string>& f, std::size_t n) {
        if (f.size() != 2) throw Error(ErrorCode::Parse, "line " + std::to_string(n) + ": expected index,value");
        rows.emplace_back(parse_int(f[0], n), parse_double(f[1], n));
      });
  if (rows.empty()) return {};
  long long lo = rows.front().first, hi = rows.front().first;
  for (const auto& [i, v] : rows) {
    lo = std::min(lo, i);
    hi = std::max(hi, i);
  }
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(Index(hi - lo + 1));
  for (const auto& [i, v] : rows) coeffs[Index(i - lo)] = v;
  return FinSeq<double>(Index(lo), std::move(coeffs));
}

PeriodicSeq<double> parse_periodic_csv(std::istream& in) {
  long long period = -1;
  std::vector<double> values;
  scan_csv(
      in,
      [&](const std::string& h, std::size_t n) {
        if (h.rfind("period=", 0) == 0) period = parse_int(trim(h.substr(7)), n);
      },
      [&](const std::vector<std::string>& f, std::size_t n) {
        if (f.size() != 1) throw Error(ErrorCode::Parse, "line " + std::to_string(n) + ": expected one value");
        values.push_back(parse_double(f[0], n));
      });
  if (period < 0) throw Error(ErrorCode::Parse, "missing '# period=N' header");
  if (std::size_t(period) != values.size())
    throw Error(ErrorCode::Parse, "header says period " + std::to_string(period) + " but file has " +
                                      std::to_string(values.size()) + " values");
  return PeriodicSeq<double>(Eigen::Map<Eigen::VectorXd>(values.data(), Index(values.size())).eval());
}

void write_csv(std::ostream& out, const FinSeq<double>& c) {
  for (Index i = 0; i < c.size(); ++i)
    out << (c.offset() + i) << ',' << format_double(c.coeffs()[i]) << '\n';
}

void write_csv(std::ostream& out, const PeriodicSeq<double>& c) {
  out << "# period=" << c.period() << '\n';
  for (Index i = 0; i < c.period(); ++i) out << format_double(c.values()[i]) << '\n';
}

PlanarCurve parse_curve_csv(std::istream& in) {
  PlanarCurve c;
  bool have_header = false;
  std::vector<double> xs, ys;
  scan_csv(
      in,
      [&](const std::string& h, std::size_t n) {
        if (h.rfind("closed=", 0) != 0) return;
        const std::string v = trim(h.substr(7));
        if (v == "true") c.closed = true;
        else if (v == "false") c.closed = false;
        else throw Error(ErrorCode::Parse, "line " + std::to_string(n) + ": closed must be true or false");
        have_header = true;
      },
      [&](const std::vector<std::string>& f, std::size_t n) {
        if (f.size() != 2) throw Error(ErrorCode::Parse, "line " + std::to_string(n) + ": expected x,y");
        xs.push_back(parse_double(f[0], n));
        ys.push_back(parse_double(f[1], n));
      });
  if (!have_header) throw Error(ErrorCode::Parse, "missing '# closed=true|false' header");
  c.points.resize(Index(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c.points(Index(i), 0) = xs[i];
    c.points(Index(i), 1) = ys[i];
  }
  return c;
}

void write_csv(std::ostream& out, const PlanarCurve& curve) {
  out << "# closed=" << (curve.closed ? "true" : "false") << '\n';
  for (Index i = 0; i < curve.size(); ++i)
    out << format_double(curve.points(i, 0)) << ',' << format_double(curve.points(i, 1)) << '\n';
}

CsvKind sniff_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] != '#') return CsvKind::FiniteSequence;
    const std::string h = trim(t.substr(1));
    if (h.rfind("closed=", 0) == 0) return CsvKind::Curve;
    if (h.rfind("period=", 0) == 0) return CsvKind::PeriodicSequence;
  }
  return CsvKind::FiniteSequence;
}

void write_mask_dump(std::ostream& out, const std::vector<Mask<double>>& masks) {
  for (const auto& m : masks)
    for (Index i = 0; i < m.taps.size(); ++i)
      out << m.level << ',' << (m.taps.offset() + i) << ',' << format_double(m.taps.coeffs()[i]) << '\n';
}

void write_filter_csv(std::ostream& out, const DecimationFilter<double>& f) {
  const Index lo = std::min(f.zeta.first(), f.gamma_raw.first());
  const Index hi = std::max(f.zeta.last(), f.gamma_raw.last());
  for (Index j = lo; j <= hi; ++j)
    out << j << ',' << format_double(f.zeta[j]) << ',' << format_double(f.gamma_raw[j]) << '\n';
}

Json filter_metadata(const DecimationFilter<double>& f) {
  Json j;
  j["epsilon"] = f.epsilon;
  j["residual_l1"] = f.residual_l1;
  j["decay_C"] = f.decay ? json_number(f.decay->C) : Json(nullptr);
  j["decay_lambda"] = f.decay ? json_number(f.decay->lambda) : Json(nullptr);
  j["nonzero"] = f.zeta.size();
  j["zeta_l1"] = norm_l1(f.zeta);
  j["window"] = f.window;
  j["mask_level"] = f.source_mask_level;
  return j;
}

Json to_json(const SchemeFamily& family) {
  Json j;
  j["kind"] = std::string(family_name(kind_of(family)));
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, StationaryFamily>) {
          j["offset"] = f.taps.offset();
          j["taps"] = values_json(f.taps.coeffs());
        } else if constexpr (std::is_same_v<F, NS4PointFamily>) {
          j["theta"] = f.theta;
        } else {
          j["v_init"] = f.v_init;
        }
      },
      family);
  return j;
}

SchemeFamily family_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "stationary")
    return StationaryFamily{FinSeq<double>(j.at("offset").get<Index>(), values_from_json(j.at("taps")))};
  if (kind == "ns4pt") return NS4PointFamily{j.at("theta").get<double>()};
  if (kind == "nscubic") return NSCubicFamily{j.at("v_init").get<double>()};
  if (kind == "conic") return ConicFamily{j.at("v_init").get<double>()};
  throw Error(ErrorCode::Parse, "unknown family kind '" + kind + "'");
}

Json to_json(const Pyramid<FinSeq<double>>& p) { return pyramid_json(p); }
Json to_json(const Pyramid<PeriodicSeq<double>>& p) { return pyramid_json(p); }

AnyPyramid pyramid_from_json(const Json& j) {
  try {
    const std::string b = j.at("boundary").get<std::string>();
    if (b == "periodic") return pyramid_from<PeriodicSeq<double>>(j);
    if (b == "finite") return pyramid_from<FinSeq<double>>(j);
    throw Error(ErrorCode::Parse, "unknown boundary '" + b + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

Json to_json(const CircularityReport& r) {
  Json j;
  j["levels"] = r.levels;
  j["per_level_l1"] = r.per_level_l1;
  j["per_level_avg_l2"] = r.per_level_avg_l2;
  j["verdict_scale"] = r.verdict_scale;
  return j;
}

Json to_json(const std::vector<AnomalyRange>& ranges) {
  Json arr = Json::array();
  for (const auto& r : ranges) {
    Json j;
    j["first"] = r.first;
    j["last"] = r.last;
    j["angle_first"] = r.angle_first;
    j["angle_last"] = r.angle_last;
    arr.push_back(std::move(j));
  }
  return arr;
}

void write_detail_norms_csv(std::ostream& out, const std::vector<LevelStats>& stats) {
  out << "level,linf,l1,avg_l2\n";
  for (const auto& s : stats)
    out << s.level << ',' << format_double(s.linf) << ',' << format_double(s.l1) << ','
        << format_double(s.avg_l2) << '\n';
}

}  // namespace nsp::io
