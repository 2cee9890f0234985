#pragma once

#include <string>
#include <vector>

namespace kcell {

// Minimal SVG writer for the campaign plots; emits fixed-precision floats
// so output is reproducible byte for byte.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double stroke_width = 1.0, bool dashed = false);
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& stroke, double stroke_width = 1.5);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& s, double size = 12.0,
            const std::string& anchor = "start");
  std::string finish() const;

 private:
  double width_, height_;
  std::string body_;
};

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool draw_line = true;
  bool draw_points = true;
};

// Scatter/line plot with optional log10 axes and an optional annotation
// line in the top-right corner (used for fitted slopes).
std::string render_plot(const std::vector<PlotSeries>& series, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        bool log_x, bool log_y, const std::string& annotation = "");

}  // namespace kcell
