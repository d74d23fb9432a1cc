#pragma once

#include <string>
#include <vector>

// Minimal static vector-graphics output for the experiment runners. Plots
// are a convenience; the CSV files are the contract.

namespace nmrqec {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<SvgSeries>& series);

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<SvgSeries>& series);

}  // namespace nmrqec
