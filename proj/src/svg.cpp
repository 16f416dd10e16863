#include "gpehho/svg.hpp"

#include "gpehho/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace gpehho {

namespace {

constexpr double width = 640.0;
constexpr double height = 480.0;
constexpr double left = 80.0;
constexpr double right = 170.0;
constexpr double top = 40.0;
constexpr double bottom = 60.0;

constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Widen to whole decades.
  void finish() {
    if (lo > hi) {
      lo = -3.0;
      hi = 0.0;
      return;
    }
    lo = std::floor(lo);
    hi = std::ceil(hi);
    if (hi - lo < 1.0) hi = lo + 1.0;
  }
};

}  // namespace

std::string emit_svg_loglog(const std::vector<SvgSeries>& series, const std::string& x_label,
                            const std::string& y_label, const std::vector<double>& reference_slopes,
                            const std::string& title) {
  Range xr;
  Range yr;
  for (const SvgSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
        throw Error(ErrorKind::render, "series '" + s.name + "' has a non-positive or non-finite value");
      xr.add(std::log10(x));
      yr.add(std::log10(y));
    }
  }
  xr.finish();
  yr.finish();
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  const auto px = [&](double x) { return left + (std::log10(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return top + (yr.hi - std::log10(y)) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(title) << "</text>\n";

  svg << "<g class=\"grid\" stroke=\"#dddddd\">\n";
  for (int e = static_cast<int>(xr.lo); e <= static_cast<int>(xr.hi); ++e) {
    const double x = px(std::pow(10.0, e));
    svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(top + ph)
        << "\"/>\n";
  }
  for (int e = static_cast<int>(yr.lo); e <= static_cast<int>(yr.hi); ++e) {
    const double y = py(std::pow(10.0, e));
    svg << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw) << "\" y2=\"" << fmt(y)
        << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect class=\"axes\" x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
      << "\" height=\"" << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(xr.lo); e <= static_cast<int>(xr.hi); ++e)
    svg << "<text x=\"" << fmt(px(std::pow(10.0, e))) << "\" y=\"" << fmt(top + ph + 18)
        << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  for (int e = static_cast<int>(yr.lo); e <= static_cast<int>(yr.hi); ++e)
    svg << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(std::pow(10.0, e)) + 4)
        << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(height - 16) << "\" text-anchor=\"middle\">"
      << escape(x_label) << "</text>\n";
  svg << "<text transform=\"translate(18 " << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(y_label) << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const SvgSeries& s = series[i];
    const char* color = palette[i % palette.size()];
    svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.points.size(); ++j)
      svg << (j ? " " : "") << fmt(px(s.points[j].first)) << ',' << fmt(py(s.points[j].second));
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 14.0 + 18.0 * static_cast<double>(i);
    svg << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(left + pw + 32)
        << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << fmt(left + pw + 36) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(s.name) << "</text>\n";
  }

  // Slope triangles half a decade wide in the lower right corner; smaller
  // x means smaller y for a positive order.
  const double dx = 0.5 * pw / (xr.hi - xr.lo);
  for (std::size_t i = 0; i < reference_slopes.size(); ++i) {
    const double p = reference_slopes[i];
    const double rise = p * 0.5 * ph / (yr.hi - yr.lo);
    const double x2 = left + pw - 16.0 - 24.0 * static_cast<double>(i);
    const double x1 = x2 - dx;
    const double base = top + ph - 16.0;
    const double y1 = rise >= 0.0 ? base : base + rise;
    const double y2 = y1 - rise;
    svg << "<g class=\"reference\" stroke=\"#555555\" stroke-dasharray=\"4 3\" fill=\"none\">"
        << "<line class=\"slope\" x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\""
        << fmt(y2) << "\"/>"
        << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y2) << "\"/>"
        << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y2) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
        << "\"/></g>\n";
    svg << "<text x=\"" << fmt(x1 - 4) << "\" y=\"" << fmt(0.5 * (y1 + y2) + 4) << "\" text-anchor=\"end\">" << fmt(p)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace gpehho
