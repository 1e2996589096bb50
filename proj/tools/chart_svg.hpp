#pragma once

#include <string>
#include <vector>

namespace rsqcli {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (p, re), ordered by p
};

struct Facet {
  std::string title;  // e.g. "normal:0,1  rho=1"
  std::vector<Series> series;
};

/// Renders relative-efficiency line charts: one panel per facet, one
/// polyline per series, a dashed grey reference at RE = 1, shared legend.
/// Output bytes are a pure function of the input.
std::string render_re_chart(const std::vector<Facet>& facets);

}  // namespace rsqcli
