#include "chart_svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rsqcli {

namespace {

constexpr int kPanelWidth = 360;
constexpr int kPanelHeight = 260;
constexpr int kMarginLeft = 52;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 34;
constexpr int kMarginBottom = 40;
constexpr int kLegendHeight = 26;
constexpr int kMaxColumns = 3;

const char* kPalette[] = {"#4363d8", "#e6194b", "#3cb44b", "#f58231",
                          "#911eb4", "#0b7f7f", "#9a6324", "#808000"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  double map(double v, double px_lo, double px_hi) const {
    const double span = hi - lo;
    const double t = span == 0.0 ? 0.5 : (v - lo) / span;
    return px_lo + t * (px_hi - px_lo);
  }
};

std::vector<double> nice_ticks(double lo, double hi, int target) {
  const double span = hi - lo;
  if (span <= 0.0) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (double v = first; v <= hi + 1e-12 * span; v += step) {
    ticks.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
  }
  return ticks;
}

}  // namespace

std::string render_re_chart(const std::vector<Facet>& facets) {
  const int cols = std::min<int>(kMaxColumns, std::max<std::size_t>(facets.size(), 1));
  const int rows = static_cast<int>((facets.size() + cols - 1) / cols);
  const int width = cols * kPanelWidth;
  const int height = rows * kPanelHeight + kLegendHeight;

  // Legend entries: first appearance order across facets.
  std::vector<std::string> legend;
  for (const auto& facet : facets) {
    for (const auto& s : facet.series) {
      if (std::find(legend.begin(), legend.end(), s.label) == legend.end()) {
        legend.push_back(s.label);
      }
    }
  }
  auto color_of = [&](const std::string& label) {
    const auto it = std::find(legend.begin(), legend.end(), label);
    const std::size_t idx = static_cast<std::size_t>(it - legend.begin());
    return kPalette[idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  for (std::size_t f = 0; f < facets.size(); ++f) {
    const Facet& facet = facets[f];
    const int col = static_cast<int>(f) % cols;
    const int row = static_cast<int>(f) / cols;
    const double x0 = col * kPanelWidth + kMarginLeft;
    const double x1 = (col + 1) * kPanelWidth - kMarginRight;
    const double y0 = row * kPanelHeight + kMarginTop;
    const double y1 = (row + 1) * kPanelHeight - kMarginBottom;

    Range xr, yr;
    xr.lo = 1e300;
    xr.hi = -1e300;
    double re_max = 1.0;
    for (const auto& s : facet.series) {
      for (const auto& [p, re] : s.points) {
        xr.lo = std::min(xr.lo, p);
        xr.hi = std::max(xr.hi, p);
        re_max = std::max(re_max, re);
      }
    }
    if (xr.lo > xr.hi) {
      xr.lo = 0.0;
      xr.hi = 1.0;
    }
    yr.lo = 0.0;
    yr.hi = re_max * 1.06;

    auto px = [&](double v) { return xr.map(v, x0, x1); };
    auto py = [&](double v) { return yr.map(v, y1, y0); };

    svg << "<text x=\"" << fmt(0.5 * (x0 + x1)) << "\" y=\"" << fmt(y0 - 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
        << xml_escape(facet.title) << "</text>\n";
    svg << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(x1 - x0)
        << "\" height=\"" << fmt(y1 - y0) << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (double t : nice_ticks(xr.lo, xr.hi, 5)) {
      const double x = px(t);
      svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x) << "\" y2=\""
          << fmt(y1 + 4) << "\" stroke=\"#333333\"/>\n";
      svg << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y1 + 16)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">" << fmt(t)
          << "</text>\n";
    }
    for (double t : nice_ticks(yr.lo, yr.hi, 5)) {
      const double y = py(t);
      svg << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x0)
          << "\" y2=\"" << fmt(y) << "\" stroke=\"#333333\"/>\n";
      svg << "<text x=\"" << fmt(x0 - 7) << "\" y=\"" << fmt(y + 3)
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" << fmt(t)
          << "</text>\n";
    }
    svg << "<text x=\"" << fmt(0.5 * (x0 + x1)) << "\" y=\"" << fmt(y1 + 30)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">p</text>\n";
    svg << "<text x=\"" << fmt(x0 - 38) << "\" y=\"" << fmt(0.5 * (y0 + y1))
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << fmt(x0 - 38) << ' ' << fmt(0.5 * (y0 + y1)) << ")\">RE</text>\n";

    // dashed reference at RE = 1
    if (yr.hi >= 1.0) {
      const double y = py(1.0);
      svg << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x1)
          << "\" y2=\"" << fmt(y) << "\" stroke=\"#888888\" stroke-dasharray=\"5,4\"/>\n";
    }

    for (const auto& s : facet.series) {
      if (s.points.empty()) continue;
      svg << "<polyline fill=\"none\" stroke=\"" << color_of(s.label)
          << "\" stroke-width=\"1.6\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) svg << ' ';
        svg << fmt(px(s.points[i].first)) << ',' << fmt(py(s.points[i].second));
      }
      svg << "\"/>\n";
    }
  }

  // legend strip along the bottom
  double lx = 12.0;
  const double ly = rows * kPanelHeight + kLegendHeight - 10;
  for (const auto& label : legend) {
    svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 18)
        << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color_of(label)
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << fmt(lx + 22) << "\" y=\"" << fmt(ly)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(label) << "</text>\n";
    lx += 26.0 + 7.0 * label.size() + 16.0;
  }

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rsqcli
