#pragma once

#include <string>
#include <vector>

namespace noma {

// Minimal line-plot writer, enough for mean curves with spread bands.
// No external dependencies; output is a standalone SVG document.
struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;      // mean
  std::vector<double> y_lo;   // optional band, same length as y or empty
  std::vector<double> y_hi;
};

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<SvgSeries>& series);

}  // namespace noma
