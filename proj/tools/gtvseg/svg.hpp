#pragma once

#include <string>
#include <vector>

namespace gtvseg::cli {

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

/// Tukey box plot: quartiles by linear interpolation, whiskers at the most
/// extreme values within 1.5 IQR, outliers as dots. Empty groups draw a label only.
std::string boxplot_svg(const std::vector<BoxGroup>& groups, const std::string& title,
                        const std::string& y_label);

/// Scatter plot with a free-text annotation under the title.
std::string scatter_svg(const std::vector<double>& x, const std::vector<double>& y,
                        const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::string& annotation);

std::string xml_escape(const std::string& s);

}  // namespace gtvseg::cli
