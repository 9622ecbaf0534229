#include "nsp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nsp::svg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 56.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

void open(std::ostringstream& out, const std::string& title) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << escape(title) << "</text>\n";
}

void close(std::ostringstream& out) { out << "</svg>\n"; }

void legend(std::ostringstream& out, const std::vector<Series>& series) {
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kMargin + 14.0 * double(s);
    out << "<rect class=\"legend\" x=\"" << num(kWidth - 170) << "\" y=\"" << num(y - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[s % 8] << "\"/>\n"
        << "<text x=\"" << num(kWidth - 155) << "\" y=\"" << num(y)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(series[s].name) << "</text>\n";
  }
}

// Axis frame plus log10 decade ticks between lo and hi.
void log_axis(std::ostringstream& out, int lo, int hi, double plot_h) {
  out << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << num(kMargin + plot_h) << "\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << num(kMargin + plot_h) << "\" x2=\""
      << num(kWidth - kMargin) << "\" y2=\"" << num(kMargin + plot_h) << "\"/>\n</g>\n";
  const int step = std::max(1, (hi - lo) / 8);
  for (int e = lo; e <= hi; e += step) {
    const double y = kMargin + plot_h * (1.0 - double(e - lo) / double(std::max(1, hi - lo)));
    out << "<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">1e" << e << "</text>\n";
  }
}

std::pair<int, int> log_range(const std::vector<Series>& series) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& s : series)
    for (double v : s.values)
      if (v > 0.0 && std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
  if (!(hi > 0.0)) return {-1, 0};
  int a = int(std::floor(std::log10(lo)));
  int b = int(std::ceil(std::log10(hi)));
  if (a == b) ++b;
  return {a, b};
}

}  // namespace

std::string curve_overlay(const CurveOverlay& fig) {
  double lo_x = std::numeric_limits<double>::infinity(), hi_x = -lo_x;
  double lo_y = lo_x, hi_y = -lo_x;
  auto grow = [&](double x, double y) {
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  };
  for (Index i = 0; i < fig.fine.size(); ++i) grow(fig.fine.points(i, 0), fig.fine.points(i, 1));
  for (const auto& p : fig.coarse) grow(p.x(), p.y());
  if (fig.reference_circle) {
    grow(fig.center.x() - fig.R, fig.center.y() - fig.R);
    grow(fig.center.x() + fig.R, fig.center.y() + fig.R);
  }
  if (!std::isfinite(lo_x)) lo_x = lo_y = -1.0, hi_x = hi_y = 1.0;

  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double scale = (kHeight - 2 * kMargin) / span;
  const double ox = kWidth / 2 - scale * (lo_x + hi_x) / 2;
  const double oy = kHeight / 2 + scale * (lo_y + hi_y) / 2;
  auto X = [&](double x) { return num(ox + scale * x); };
  auto Y = [&](double y) { return num(oy - scale * y); };

  std::ostringstream out;
  open(out, fig.title);
  if (fig.reference_circle)
    out << "<circle class=\"reference\" cx=\"" << X(fig.center.x()) << "\" cy=\"" << Y(fig.center.y())
        << "\" r=\"" << num(scale * fig.R) << "\" fill=\"none\" stroke=\"blue\" stroke-width=\"1\"/>\n";

  if (fig.fine.size() > 0) {
    out << "<polyline class=\"fine\" fill=\"none\" stroke=\"red\" stroke-width=\"0.8\" points=\"";
    for (Index i = 0; i < fig.fine.size(); ++i)
      out << X(fig.fine.points(i, 0)) << ',' << Y(fig.fine.points(i, 1)) << ' ';
    if (fig.fine.closed) out << X(fig.fine.points(0, 0)) << ',' << Y(fig.fine.points(0, 1));
    out << "\"/>\n<g class=\"fine-points\" fill=\"red\">\n";
    for (Index i = 0; i < fig.fine.size(); ++i)
      out << "<circle cx=\"" << X(fig.fine.points(i, 0)) << "\" cy=\"" << Y(fig.fine.points(i, 1))
          << "\" r=\"1.6\"/>\n";
    out << "</g>\n";
  }
  if (!fig.highlight.empty()) {
    out << "<g class=\"highlight\" fill=\"orange\">\n";
    for (Index i : fig.highlight) {
      const Index j = ((i % fig.fine.size()) + fig.fine.size()) % fig.fine.size();
      out << "<circle cx=\"" << X(fig.fine.points(j, 0)) << "\" cy=\"" << Y(fig.fine.points(j, 1))
          << "\" r=\"3\"/>\n";
    }
    out << "</g>\n";
  }
  out << "<g class=\"coarse\" fill=\"black\">\n";
  for (const auto& p : fig.coarse)
    out << "<rect x=\"" << num(ox + scale * p.x() - 3.5) << "\" y=\"" << num(oy - scale * p.y() - 3.5)
        << "\" width=\"7\" height=\"7\"/>\n";
  out << "</g>\n";
  close(out);
  return out.str();
}

std::string bar_chart(const std::string& title, const std::vector<std::string>& categories,
                      const std::vector<Series>& series, bool log_scale) {
  std::ostringstream out;
  open(out, title);
  const double plot_w = kWidth - 2 * kMargin - 120.0;
  const double plot_h = kHeight - 2 * kMargin;
  const double base = kMargin + plot_h;

  auto [lo, hi] = log_range(series);
  double vmax = 0.0;
  for (const auto& s : series)
    for (double v : s.values)
      if (std::isfinite(v)) vmax = std::max(vmax, v);
  if (!(vmax > 0.0)) vmax = 1.0;

  auto height = [&](double v) {
    if (!(v > 0.0) || !std::isfinite(v)) return 0.0;
    if (!log_scale) return plot_h * v / vmax;
    return std::max(0.0, plot_h * (std::log10(v) - lo) / double(hi - lo));
  };

  if (log_scale) {
    log_axis(out, lo, hi, plot_h);
  } else {
    out << "<g class=\"axes\" stroke=\"black\">\n<line x1=\"" << kMargin << "\" y1=\"" << kMargin
        << "\" x2=\"" << kMargin << "\" y2=\"" << num(base) << "\"/>\n<line x1=\"" << kMargin
        << "\" y1=\"" << num(base) << "\" x2=\"" << num(kMargin + plot_w) << "\" y2=\"" << num(base)
        << "\"/>\n</g>\n<text x=\"" << num(kMargin - 6) << "\" y=\"" << num(kMargin + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
        << escape(num(vmax)) << "</text>\n";
  }

  const std::size_t n = std::max<std::size_t>(categories.size(), 1);
  const double group_w = plot_w / double(n);
  const double bar_w = 0.8 * group_w / double(std::max<std::size_t>(series.size(), 1));
  out << "<g class=\"bars\">\n";
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kMargin + group_w * (double(c) + 0.1);
    for (std::size_t s = 0; s < series.size(); ++s) {
      const double v = c < series[s].values.size() ? series[s].values[c] : 0.0;
      const double h = height(v);
      out << "<rect x=\"" << num(gx + bar_w * double(s)) << "\" y=\"" << num(base - h)
          << "\" width=\"" << num(bar_w) << "\" height=\"" << num(h) << "\" fill=\""
          << kPalette[s % 8] << "\"><title>" << escape(series[s].name) << ' '
          << escape(categories[c]) << "</title></rect>\n";
    }
    out << "<text x=\"" << num(gx + 0.4 * group_w) << "\" y=\"" << num(base + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << escape(categories[c]) << "</text>\n";
  }
  out << "</g>\n";
  legend(out, series);
  close(out);
  return out.str();
}

std::string log_line_plot(const std::string& title, const std::string& x_label,
                          const std::vector<Series>& series) {
  std::ostringstream out;
  open(out, title);
  const double plot_w = kWidth - 2 * kMargin - 120.0;
  const double plot_h = kHeight - 2 * kMargin;
  auto [lo, hi] = log_range(series);
  const double floor_value = std::pow(10.0, lo);
  log_axis(out, lo, hi, plot_h);

  std::size_t n = 1;
  for (const auto& s : series) n = std::max(n, s.values.size());
  auto X = [&](std::size_t i) {
    return kMargin + (n > 1 ? plot_w * double(i) / double(n - 1) : plot_w / 2);
  };
  auto Y = [&](double v) {
    const double lv = std::log10(std::max(v > 0.0 && std::isfinite(v) ? v : floor_value, floor_value));
    return kMargin + plot_h * (1.0 - (lv - lo) / double(hi - lo));
  };
  for (std::size_t i = 0; i < n; ++i)
    out << "<text x=\"" << num(X(i)) << "\" y=\"" << num(kMargin + plot_h + 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << (i + 1)
        << "</text>\n";
  out << "<text x=\"" << num(kMargin + plot_w / 2) << "\" y=\"" << num(kHeight - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(x_label)
      << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline class=\"series\" fill=\"none\" stroke=\"" << kPalette[s % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].values.size(); ++i)
      out << num(X(i)) << ',' << num(Y(series[s].values[i])) << ' ';
    out << "\"/>\n";
    for (std::size_t i = 0; i < series[s].values.size(); ++i)
      out << "<circle cx=\"" << num(X(i)) << "\" cy=\"" << num(Y(series[s].values[i]))
          << "\" r=\"2.5\" fill=\"" << kPalette[s % 8] << "\"/>\n";
  }
  legend(out, series);
  close(out);
  return out.str();
}

}  // namespace nsp::svg
