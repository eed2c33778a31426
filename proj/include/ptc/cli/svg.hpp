#pragma once

#include <string>
#include <vector>

namespace ptc::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  ///< empty picks from the palette
  double width = 1.5;
  double opacity = 1.0;
};

struct Panel {
  std::string ylabel;
  std::vector<Series> series;
};

/// Stacked line panels sharing the x axis, as a standalone SVG document.
/// Long series are reduced to per-pixel min/max pairs so spikes survive.
std::string render_panels(const std::string& title, const std::string& xlabel, const std::vector<Panel>& panels,
                          int width = 900, int panel_height = 220);

}  // namespace ptc::cli
