#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "tvcs/phaselab.hpp"

namespace tvcs {

std::string gray_hex(double fraction) {
  const int level = static_cast<int>(std::lround(255.0 * std::clamp(fraction, 0.0, 1.0)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", level, level, level);
  return buf;
}

namespace {

constexpr double kLeft = 70.0, kTop = 20.0, kWidth = 600.0, kHeight = 400.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Cell edges around sorted centers; geometric midpoints when logarithmic.
std::vector<double> edges(const std::vector<double>& centers, bool log_scale, double lone_halfwidth) {
  std::vector<double> e;
  if (centers.size() == 1) {
    const double c = centers[0];
    return log_scale ? std::vector<double>{c / std::sqrt(2.0), c * std::sqrt(2.0)}
                     : std::vector<double>{c - lone_halfwidth, c + lone_halfwidth};
  }
  auto mid = [&](double a, double b) { return log_scale ? std::sqrt(a * b) : 0.5 * (a + b); };
  const double first = centers[0], second = centers[1];
  e.push_back(log_scale ? first * first / mid(first, second) : first - (mid(first, second) - first));
  for (std::size_t i = 0; i + 1 < centers.size(); ++i) e.push_back(mid(centers[i], centers[i + 1]));
  const double last = centers.back(), prev = centers[centers.size() - 2];
  e.push_back(log_scale ? last * last / mid(prev, last) : last + (last - mid(prev, last)));
  return e;
}

}  // namespace

std::string render_heatmap_svg(const PhaseGrid& grid, const HeatmapOverlays& overlays) {
  if (grid.cells.empty()) throw std::invalid_argument("render_heatmap_svg: empty grid");
  const auto ns = grid.dimensions();
  std::vector<double> n_centers(ns.begin(), ns.end());
  const auto n_edges = edges(n_centers, true, 0.0);

  // Column edges in m, and the overall m range.
  std::map<int, std::vector<double>> m_edges;
  double m_lo = 1e300, m_hi = -1e300;
  for (int n : ns) {
    std::vector<double> ms;
    for (const auto& c : grid.column(n)) ms.push_back(c.m);
    m_edges[n] = edges(ms, false, 0.5);
    m_lo = std::min(m_lo, m_edges[n].front());
    m_hi = std::max(m_hi, m_edges[n].back());
  }
  m_lo = std::max(0.0, m_lo);

  const double log_lo = std::log(n_edges.front()), log_hi = std::log(n_edges.back());
  auto px = [&](double n) { return kLeft + kWidth * (std::log(n) - log_lo) / (log_hi - log_lo); };
  auto py = [&](double m) { return kTop + kHeight * (1.0 - (m - m_lo) / (m_hi - m_lo)); };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kLeft + kWidth + 20)
      << "\" height=\"" << num(kTop + kHeight + 50) << "\">\n";
  svg << "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    const auto col = grid.column(n);
    const auto& me = m_edges[n];
    const double x0 = px(n_edges[i]), x1 = px(n_edges[i + 1]);
    for (std::size_t k = 0; k < col.size(); ++k) {
      const double y0 = py(me[k + 1]), y1 = py(std::max(me[k], m_lo));
      svg << "<rect class=\"cell\" data-n=\"" << n << "\" data-m=\"" << col[k].m << "\" x=\"" << num(x0)
          << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\"" << num(y1 - y0)
          << "\" fill=\"" << gray_hex(col[k].fraction()) << "\"/>\n";
    }
  }
  svg << "</g>\n";

  // Axes and ticks.
  svg << "<g id=\"axes\" stroke=\"#000000\" fill=\"none\">\n";
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(kWidth)
      << "\" height=\"" << num(kHeight) << "\"/>\n</g>\n";
  svg << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#000000\">\n";
  for (int n : ns)
    svg << "<text x=\"" << num(px(n)) << "\" y=\"" << num(kTop + kHeight + 15)
        << "\" text-anchor=\"middle\">" << n << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double m = m_lo + (m_hi - m_lo) * t / 4.0;
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(m) + 4) << "\" text-anchor=\"end\">"
        << num(m) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + kWidth / 2) << "\" y=\"" << num(kTop + kHeight + 35)
      << "\" text-anchor=\"middle\">ambient dimension n (log scale)</text>\n";
  svg << "<text x=\"15\" y=\"" << num(kTop + kHeight / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << num(kTop + kHeight / 2) << ")\">measurements m</text>\n";
  svg << "</g>\n";

  auto polyline = [&](const std::vector<std::pair<int, double>>& pts, const char* id, const char* color,
                      const char* dash) {
    if (pts.empty()) return;
    svg << "<polyline id=\"" << id << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"";
    if (dash) svg << " stroke-dasharray=\"" << dash << "\"";
    svg << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double m = std::clamp(pts[i].second, m_lo, m_hi);
      svg << (i ? " " : "") << num(px(pts[i].first)) << ',' << num(py(m));
    }
    svg << "\"/>\n";
  };
  polyline(overlays.width_curve, "width-curve", "#d62728", nullptr);
  polyline(overlays.bound_curve, "bound-curve", "#1f77b4", "6,4");
  svg << "</svg>\n";
  return svg.str();
}

void render_heatmap_svg(const PhaseGrid& grid, const HeatmapOverlays& overlays, const std::string& path) {
  const std::string text = render_heatmap_svg(grid, overlays);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace tvcs
