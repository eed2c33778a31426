#include "ptc/cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ptc::cli {

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
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

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return t;
}

}  // namespace

std::string render_panels(const std::string& title, const std::string& xlabel, const std::vector<Panel>& panels,
                          int width, int panel_height) {
  const double left = 80, right = 160, top = 40, gap = 30, bottom = 45;
  const double plot_w = width - left - right;
  const int height = static_cast<int>(top + panels.size() * (panel_height + gap) + bottom);

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  for (const auto& p : panels)
    for (const auto& s : p.series)
      for (double x : s.x)
        if (std::isfinite(x)) {
          xmin = std::min(xmin, x);
          xmax = std::max(xmax, x);
        }
  if (!std::isfinite(xmin)) {
    xmin = 0.0;
    xmax = 1.0;
  }
  if (xmax <= xmin) xmax = xmin + 1.0;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& panel = panels[pi];
    const double y0 = top + pi * (panel_height + gap);
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (const auto& s : panel.series)
      for (double y : s.y)
        if (std::isfinite(y)) {
          ymin = std::min(ymin, y);
          ymax = std::max(ymax, y);
        }
    if (!std::isfinite(ymin)) {
      ymin = -1.0;
      ymax = 1.0;
    }
    if (ymax - ymin < 1e-12 * std::max(1.0, std::abs(ymax))) {
      ymin -= 1.0;
      ymax += 1.0;
    }
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return y0 + (ymax - y) / (ymax - ymin) * panel_height; };

    o << "<rect x=\"" << left << "\" y=\"" << y0 << "\" width=\"" << plot_w << "\" height=\"" << panel_height
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (double t : ticks(ymin, ymax)) {
      o << "<line x1=\"" << left << "\" x2=\"" << left + plot_w << "\" y1=\"" << sy(t) << "\" y2=\"" << sy(t)
        << "\" stroke=\"#ddd\"/>\n";
      o << "<text x=\"" << left - 6 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";
    }
    for (double t : ticks(xmin, xmax)) {
      o << "<line x1=\"" << sx(t) << "\" x2=\"" << sx(t) << "\" y1=\"" << y0 << "\" y2=\"" << y0 + panel_height
        << "\" stroke=\"#eee\"/>\n";
      o << "<text x=\"" << sx(t) << "\" y=\"" << y0 + panel_height + 14 << "\" text-anchor=\"middle\">" << fmt(t)
        << "</text>\n";
    }
    o << "<text x=\"18\" y=\"" << y0 + panel_height / 2.0 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << y0 + panel_height / 2.0 << ")\">" << escape(panel.ylabel) << "</text>\n";

    int legend = 0;
    for (std::size_t si = 0; si < panel.series.size(); ++si) {
      const auto& s = panel.series[si];
      const std::string color = s.color.empty() ? kPalette[si % kPalette.size()] : s.color;
      // Min/max per horizontal pixel column.
      const int columns = static_cast<int>(plot_w);
      std::vector<std::pair<double, double>> pts;
      if (s.x.size() <= static_cast<std::size_t>(2 * columns)) {
        for (std::size_t k = 0; k < s.x.size(); ++k)
          if (std::isfinite(s.y[k])) pts.emplace_back(s.x[k], s.y[k]);
      } else {
        int col = -1;
        double lo = 0, hi = 0, xlo = 0, xhi = 0;
        auto flush = [&] {
          if (col < 0) return;
          if (xlo <= xhi) {
            pts.emplace_back(xlo, lo);
            pts.emplace_back(xhi, hi);
          } else {
            pts.emplace_back(xhi, hi);
            pts.emplace_back(xlo, lo);
          }
        };
        for (std::size_t k = 0; k < s.x.size(); ++k) {
          if (!std::isfinite(s.y[k])) continue;
          const int c = static_cast<int>((s.x[k] - xmin) / (xmax - xmin) * columns);
          if (c != col) {
            flush();
            col = c;
            lo = hi = s.y[k];
            xlo = xhi = s.x[k];
          } else {
            if (s.y[k] < lo) {
              lo = s.y[k];
              xlo = s.x[k];
            }
            if (s.y[k] > hi) {
              hi = s.y[k];
              xhi = s.x[k];
            }
          }
        }
        flush();
      }
      if (pts.empty()) continue;
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << s.width << "\"";
      if (s.opacity < 1.0) o << " stroke-opacity=\"" << s.opacity << "\"";
      o << " points=\"";
      for (const auto& [x, y] : pts) o << fmt(sx(x), 7) << ',' << fmt(sy(std::clamp(y, ymin, ymax)), 7) << ' ';
      o << "\"/>\n";
      if (!s.name.empty()) {
        const double ly = y0 + 14 + 16 * legend++;
        o << "<line x1=\"" << left + plot_w + 12 << "\" x2=\"" << left + plot_w + 32 << "\" y1=\"" << ly - 4
          << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + plot_w + 38 << "\" y=\"" << ly << "\">" << escape(s.name) << "</text>\n";
      }
    }
  }
  o << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
    << escape(xlabel) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace ptc::cli
