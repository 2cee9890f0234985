#include "kcell/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace kcell {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2,
                     const std::string& stroke, double stroke_width, bool dashed) {
  body_ += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
           "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           fmt(stroke_width) + "\"";
  if (dashed) body_ += " stroke-dasharray=\"5,4\"";
  body_ += "/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& stroke, double stroke_width) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
           fmt(stroke_width) + "\" points=\"";
  for (size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ += " ";
    body_ += fmt(pts[i].first) + "," + fmt(pts[i].second);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& anchor) {
  body_ += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" + fmt(size) +
           "\" font-family=\"monospace\" text-anchor=\"" + anchor + "\">" +
           escape_xml(s) + "</text>\n";
}

std::string SvgCanvas::finish() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width_) +
         "\" height=\"" + fmt(height_) + "\" viewBox=\"0 0 " + fmt(width_) + " " +
         fmt(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

namespace {

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log_scale = false;

  double place(double v, double px_lo, double px_hi) const {
    double t = log_scale ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return px_lo + t * (px_hi - px_lo);
  }
};

Axis fit_axis(const std::vector<const std::vector<double>*>& columns, bool log_scale) {
  Axis ax;
  ax.log_scale = log_scale;
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const auto* col : columns) {
    for (double v : *col) {
      if (log_scale && !(v > 0.0)) continue;
      double t = log_scale ? std::log10(v) : v;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  double pad = 0.05 * (hi - lo);
  ax.lo = lo - pad;
  ax.hi = hi + pad;
  return ax;
}

std::string tick_label(double t, bool log_scale) {
  char buf[32];
  if (log_scale)
    std::snprintf(buf, sizeof(buf), "%.3g", std::pow(10.0, t));
  else
    std::snprintf(buf, sizeof(buf), "%.3g", t);
  return buf;
}

}  // namespace

std::string render_plot(const std::vector<PlotSeries>& series, const std::string& title,
                        const std::string& x_label, const std::string& y_label,
                        bool log_x, bool log_y, const std::string& annotation) {
  const double w = 640.0, h = 480.0;
  const double ml = 70.0, mr = 24.0, mt = 40.0, mb = 56.0;
  SvgCanvas svg(w, h);

  std::vector<const std::vector<double>*> xs, ys;
  for (const PlotSeries& s : series) {
    xs.push_back(&s.x);
    ys.push_back(&s.y);
  }
  Axis ax = fit_axis(xs, log_x);
  Axis ay = fit_axis(ys, log_y);

  auto px = [&](double v) { return ax.place(v, ml, w - mr); };
  auto py = [&](double v) { return ay.place(v, h - mb, mt); };

  // Frame and ticks.
  svg.line(ml, mt, ml, h - mb, "black");
  svg.line(ml, h - mb, w - mr, h - mb, "black");
  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    double tx = ax.lo + (ax.hi - ax.lo) * i / n_ticks;
    double ty = ay.lo + (ay.hi - ay.lo) * i / n_ticks;
    double xpix = ml + (w - ml - mr) * i / n_ticks;
    double ypix = (h - mb) - (h - mt - mb) * i / n_ticks;
    svg.line(xpix, h - mb, xpix, h - mb + 5, "black");
    svg.text(xpix, h - mb + 18, tick_label(tx, log_x), 10.0, "middle");
    svg.line(ml - 5, ypix, ml, ypix, "black");
    svg.text(ml - 8, ypix + 3, tick_label(ty, log_y), 10.0, "end");
  }
  svg.text(w / 2, 22, title, 14.0, "middle");
  svg.text(w / 2, h - 14, x_label, 12.0, "middle");
  svg.text(16, mt - 10, y_label, 12.0);
  if (!annotation.empty()) svg.text(w - mr, mt - 10, annotation, 12.0, "end");

  double legend_y = mt + 14;
  for (const PlotSeries& s : series) {
    std::vector<std::pair<double, double>> pts;
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if ((log_x && !(s.x[i] > 0.0)) || (log_y && !(s.y[i] > 0.0))) continue;
      pts.emplace_back(px(s.x[i]), py(s.y[i]));
    }
    if (s.draw_line) svg.polyline(pts, s.color);
    if (s.draw_points)
      for (const auto& p : pts) svg.circle(p.first, p.second, 3.0, s.color);
    if (!s.label.empty()) {
      svg.circle(ml + 10, legend_y - 3, 3.0, s.color);
      svg.text(ml + 18, legend_y, s.label, 11.0);
      legend_y += 14;
    }
  }
  return svg.finish();
}

}  // namespace kcell
