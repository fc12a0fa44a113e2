// Minimal SVG writer for debugging: named layers of polygons (with holes,
// even-odd fill), polylines, and point markers, in world coordinates with a
// flipped y axis.
#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "coguide/poly2d.hpp"

namespace coguide {

class SvgWriter {
 public:
  struct Layer {
    std::string id;
    std::string fill = "none";
    std::string stroke = "#000000";
    double stroke_width = 0.02;
    double fill_opacity = 0.4;
    std::string body;
  };

  void add_multipolygon(const std::string& id, const MultiPolygon& m, const std::string& fill,
                        const std::string& stroke = "none") {
    Layer layer;
    layer.id = id;
    layer.fill = fill;
    layer.stroke = stroke;
    std::string d;
    auto emit_ring = [&](const Ring& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        d += (i == 0 ? "M " : "L ");
        d += num(r[i].x) + " " + num(-r[i].y) + " ";
        expand(r[i]);
      }
      d += "Z ";
    };
    for (const Polygon& p : m.parts) {
      emit_ring(p.outer);
      for (const Ring& h : p.holes) emit_ring(h);
    }
    layer.body = "<path fill-rule=\"evenodd\" d=\"" + d + "\"/>\n";
    layers_.push_back(std::move(layer));
  }

  void add_polyline(const std::string& id, const std::vector<Vec2>& pts,
                    const std::string& stroke, double width = 0.05) {
    Layer layer;
    layer.id = id;
    layer.stroke = stroke;
    layer.stroke_width = width;
    std::string d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d += (i == 0 ? "M " : "L ");
      d += num(pts[i].x) + " " + num(-pts[i].y) + " ";
      expand(pts[i]);
    }
    layer.body = "<path d=\"" + d + "\"/>\n";
    layers_.push_back(std::move(layer));
  }

  void add_point(const std::string& id, const Vec2& p, const std::string& fill,
                 double radius = 0.12) {
    Layer layer;
    layer.id = id;
    layer.fill = fill;
    layer.body = "<circle cx=\"" + num(p.x) + "\" cy=\"" + num(-p.y) + "\" r=\"" + num(radius) +
                 "\"/>\n";
    expand(p);
    layers_.push_back(std::move(layer));
  }

  void write(std::ostream& os) const {
    const double pad = 0.5;
    const double x0 = min_.x - pad, y0 = -max_.y - pad;
    const double w = (max_.x - min_.x) + 2 * pad, h = (max_.y - min_.y) + 2 * pad;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 << ' ' << y0 << ' ' << w
       << ' ' << h << "\" width=\"900\" height=\"" << 900.0 * h / std::max(w, 1e-9) << "\">\n";
    for (const Layer& layer : layers_) {
      os << "<g id=\"" << layer.id << "\" fill=\"" << layer.fill << "\" stroke=\""
         << layer.stroke << "\" stroke-width=\"" << layer.stroke_width << "\" fill-opacity=\""
         << layer.fill_opacity << "\">\n";
      os << layer.body;
      os << "</g>\n";
    }
    os << "</svg>\n";
  }

 private:
  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
  }
  void expand(const Vec2& p) {
    min_.x = std::min(min_.x, p.x);
    min_.y = std::min(min_.y, p.y);
    max_.x = std::max(max_.x, p.x);
    max_.y = std::max(max_.y, p.y);
  }

  std::vector<Layer> layers_;
  Vec2 min_{kInfinity, kInfinity};
  Vec2 max_{-kInfinity, -kInfinity};
};

}  // namespace coguide
