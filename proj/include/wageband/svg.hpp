#pragma once

#include <string>
#include <vector>

namespace wageband::svg {

/// Self-contained SVG line/scatter chart: inline styling, generic font
/// family, no external resources and no timestamps, so output is byte-stable.
class Plot {
 public:
  Plot(std::string title, std::string x_label, std::string y_label);

  Plot& line(const std::vector<double>& x, const std::vector<double>& y, std::string label,
             std::string color = "");
  Plot& scatter(const std::vector<double>& x, const std::vector<double>& y, std::string label,
                std::string color = "", double radius = 2.5);
  /// Vertical reference line at x.
  Plot& vline(double x, std::string label, std::string color = "#888888");

  std::string render(int width = 720, int height = 480) const;

 private:
  struct Series {
    std::vector<double> x, y;
    std::string label, color;
    bool points = false;
    double radius = 2.5;
  };
  struct Marker {
    double x;
    std::string label, color;
  };
  std::string next_color();

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Marker> markers_;
  std::size_t palette_index_ = 0;
};

}  // namespace wageband::svg
