#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace oma {

/// Minimal hand-rolled SVG scatter/line plot: one x/y axis pair with ticks,
/// polylines and markers in data coordinates. Output is deterministic.
class SvgPlot {
 public:
  struct Point {
    double x;
    double y;
  };

  enum class Marker { dot, cross };

  SvgPlot(int width, int height, std::string title);

  void set_axes(double x_min, double x_max, double y_min, double y_max,
                std::string x_label, std::string y_label);

  void add_polyline(const std::vector<Point>& points, const std::string& color,
                    double stroke_width = 1.0);

  void add_markers(const std::vector<Point>& points, Marker marker,
                   const std::string& color, double size);

  void write(const std::filesystem::path& path) const;

 private:
  struct Polyline {
    std::vector<Point> points;
    std::string color;
    double width;
  };
  struct MarkerSet {
    std::vector<Point> points;
    Marker marker;
    std::string color;
    double size;
  };

  double to_px_x(double x) const;
  double to_px_y(double y) const;

  int width_, height_;
  std::string title_;
  double x_min_ = 0.0, x_max_ = 1.0, y_min_ = 0.0, y_max_ = 1.0;
  std::string x_label_, y_label_;
  std::vector<Polyline> polylines_;
  std::vector<MarkerSet> markers_;
};

}  // namespace oma
