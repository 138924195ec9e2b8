#include "oma/svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oma/errors.hpp"

namespace oma {

namespace {

constexpr int kMarginLeft = 62;
constexpr int kMarginRight = 16;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 46;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

/// Rounded tick spacing covering the range with 4-8 ticks.
double nice_step(double span) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0;
  if (norm <= 1.5)
    step = 1.0;
  else if (norm <= 3.5)
    step = 2.0;
  else if (norm <= 7.5)
    step = 5.0;
  return step * mag;
}

}  // namespace

SvgPlot::SvgPlot(int width, int height, std::string title)
    : width_(width), height_(height), title_(std::move(title)) {}

void SvgPlot::set_axes(double x_min, double x_max, double y_min, double y_max,
                       std::string x_label, std::string y_label) {
  x_min_ = x_min;
  x_max_ = x_max > x_min ? x_max : x_min + 1.0;
  y_min_ = y_min;
  y_max_ = y_max > y_min ? y_max : y_min + 1.0;
  x_label_ = std::move(x_label);
  y_label_ = std::move(y_label);
}

void SvgPlot::add_polyline(const std::vector<Point>& points,
                           const std::string& color, double stroke_width) {
  polylines_.push_back({points, color, stroke_width});
}

void SvgPlot::add_markers(const std::vector<Point>& points, Marker marker,
                          const std::string& color, double size) {
  markers_.push_back({points, marker, color, size});
}

double SvgPlot::to_px_x(double x) const {
  const double w = width_ - kMarginLeft - kMarginRight;
  return kMarginLeft + (x - x_min_) / (x_max_ - x_min_) * w;
}

double SvgPlot::to_px_y(double y) const {
  const double h = height_ - kMarginTop - kMarginBottom;
  return kMarginTop + h - (y - y_min_) / (y_max_ - y_min_) * h;
}

void SvgPlot::write(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) raise(errc::io_failure, "cannot write " + path.string());

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_
      << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_ << ' '
      << height_ << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width_ / 2 << "\" y=\"18\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"13\">"
      << title_ << "</text>\n";

  const double px0 = to_px_x(x_min_), px1 = to_px_x(x_max_);
  const double py0 = to_px_y(y_min_), py1 = to_px_y(y_max_);
  out << "<line x1=\"" << fixed(px0) << "\" y1=\"" << fixed(py0) << "\" x2=\""
      << fixed(px1) << "\" y2=\"" << fixed(py0)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << fixed(px0) << "\" y1=\"" << fixed(py0) << "\" x2=\""
      << fixed(px0) << "\" y2=\"" << fixed(py1)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const double x_step = nice_step(x_max_ - x_min_);
  for (double t = std::ceil(x_min_ / x_step) * x_step; t <= x_max_ + 1e-12;
       t += x_step) {
    const double px = to_px_x(t);
    out << "<line x1=\"" << fixed(px) << "\" y1=\"" << fixed(py0) << "\" x2=\""
        << fixed(px) << "\" y2=\"" << fixed(py0 + 4)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fixed(px) << "\" y=\"" << fixed(py0 + 17)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << tick_label(t) << "</text>\n";
  }
  const double y_step = nice_step(y_max_ - y_min_);
  for (double t = std::ceil(y_min_ / y_step) * y_step; t <= y_max_ + 1e-12;
       t += y_step) {
    const double py = to_px_y(t);
    out << "<line x1=\"" << fixed(px0 - 4) << "\" y1=\"" << fixed(py)
        << "\" x2=\"" << fixed(px0) << "\" y2=\"" << fixed(py)
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fixed(px0 - 7) << "\" y=\"" << fixed(py + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << tick_label(t) << "</text>\n";
  }

  out << "<text x=\"" << (kMarginLeft + (width_ - kMarginLeft - kMarginRight) / 2)
      << "\" y=\"" << height_ - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">"
      << x_label_ << "</text>\n";
  out << "<text x=\"14\" y=\"" << (kMarginTop + (height_ - kMarginTop - kMarginBottom) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
         "transform=\"rotate(-90 14 "
      << (kMarginTop + (height_ - kMarginTop - kMarginBottom) / 2) << ")\">"
      << y_label_ << "</text>\n";

  for (const auto& line : polylines_) {
    out << "<polyline fill=\"none\" stroke=\"" << line.color
        << "\" stroke-width=\"" << fixed(line.width) << "\" points=\"";
    for (const auto& p : line.points)
      out << fixed(to_px_x(p.x)) << ',' << fixed(to_px_y(p.y)) << ' ';
    out << "\"/>\n";
  }

  for (const auto& set : markers_) {
    for (const auto& p : set.points) {
      const double cx = to_px_x(p.x), cy = to_px_y(p.y);
      if (set.marker == Marker::dot) {
        out << "<circle cx=\"" << fixed(cx) << "\" cy=\"" << fixed(cy)
            << "\" r=\"" << fixed(set.size) << "\" fill=\"" << set.color
            << "\"/>\n";
      } else {
        const double s = set.size;
        out << "<path d=\"M" << fixed(cx - s) << ' ' << fixed(cy - s) << " L"
            << fixed(cx + s) << ' ' << fixed(cy + s) << " M" << fixed(cx - s)
            << ' ' << fixed(cy + s) << " L" << fixed(cx + s) << ' '
            << fixed(cy - s) << "\" stroke=\"" << set.color
            << "\" stroke-width=\"1\"/>\n";
      }
    }
  }
  out << "</svg>\n";
}

}  // namespace oma
