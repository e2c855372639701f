#include "pmw/export.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace pmw {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string fixed(double v, int digits = 2) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Escapes the five XML special characters.
std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) return f * mag;
  return 10.0 * mag;
}

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

void write_polygon_csv(std::ostream& out, const ForcePolygon& poly) {
  out << "fx,fy\n";
  for (const auto& v : poly.vertices) out << full_precision(v.x()) << ',' << full_precision(v.y()) << '\n';
}

void write_polygon_svg(std::ostream& out, const std::vector<SvgLayer>& layers, const std::optional<Vec2>& marker) {
  double extent = 1e-9;
  for (const auto& l : layers)
    for (const auto& v : l.polygon.vertices) extent = std::max({extent, std::abs(v.x()), std::abs(v.y())});
  if (marker) extent = std::max({extent, std::abs(marker->x()), std::abs(marker->y())});
  extent *= 1.1;

  constexpr double size = 600.0, margin = 60.0;
  const double scale = (size - 2.0 * margin) / (2.0 * extent);
  auto sx = [&](double x) { return size / 2.0 + x * scale; };
  auto sy = [&](double y) { return size / 2.0 - y * scale; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
      << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const double step = nice_step(2.0 * extent);
  out << "<g id=\"axes\" stroke=\"#999\" stroke-width=\"0.5\" font-family=\"sans-serif\" font-size=\"10\">\n";
  for (double t = -std::floor(extent / step) * step; t <= extent; t += step) {
    out << "<line x1=\"" << fixed(sx(t)) << "\" y1=\"" << fixed(sy(0) - 3) << "\" x2=\"" << fixed(sx(t)) << "\" y2=\""
        << fixed(sy(0) + 3) << "\"/>"
        << "<line x1=\"" << fixed(sx(0) - 3) << "\" y1=\"" << fixed(sy(t)) << "\" x2=\"" << fixed(sx(0) + 3)
        << "\" y2=\"" << fixed(sy(t)) << "\"/>\n";
    if (std::abs(t) > step / 2) {
      out << "<text x=\"" << fixed(sx(t)) << "\" y=\"" << fixed(sy(0) + 14) << "\" text-anchor=\"middle\" stroke=\"none\">"
          << fixed(t, 0) << "</text>"
          << "<text x=\"" << fixed(sx(0) - 6) << "\" y=\"" << fixed(sy(t) + 3) << "\" text-anchor=\"end\" stroke=\"none\">"
          << fixed(t, 0) << "</text>\n";
    }
  }
  out << "<line x1=\"" << fixed(sx(-extent)) << "\" y1=\"" << fixed(sy(0)) << "\" x2=\"" << fixed(sx(extent))
      << "\" y2=\"" << fixed(sy(0)) << "\"/>\n"
      << "<line x1=\"" << fixed(sx(0)) << "\" y1=\"" << fixed(sy(-extent)) << "\" x2=\"" << fixed(sx(0))
      << "\" y2=\"" << fixed(sy(extent)) << "\"/>\n"
      << "<text x=\"" << fixed(size - margin / 2) << "\" y=\"" << fixed(sy(0) - 6)
      << "\" text-anchor=\"end\" stroke=\"none\" font-size=\"12\">f_x (N)</text>\n"
      << "<text x=\"" << fixed(sx(0) + 6) << "\" y=\"" << fixed(margin / 2)
      << "\" stroke=\"none\" font-size=\"12\">f_y (N)</text>\n"
      << "</g>\n";

  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const char* color = kPalette[i % kPalette.size()];
    out << "<g id=\"" << xml_escape(l.name) << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\">\n";
    out << "<path d=\"";
    for (std::size_t k = 0; k < l.polygon.vertices.size(); ++k) {
      const auto& v = l.polygon.vertices[k];
      out << (k == 0 ? "M" : " L") << fixed(sx(v.x()), 3) << ' ' << fixed(sy(v.y()), 3);
    }
    out << " Z\"/>\n</g>\n";
  }

  if (marker)
    out << "<g id=\"task-wrench\"><circle cx=\"" << fixed(sx(marker->x()), 3) << "\" cy=\""
        << fixed(sy(marker->y()), 3) << "\" r=\"3\" fill=\"black\"/></g>\n";

  out << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const double y = margin / 2 + 16.0 * static_cast<double>(i);
    out << "<line x1=\"10\" y1=\"" << fixed(y) << "\" x2=\"30\" y2=\"" << fixed(y) << "\" stroke=\""
        << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\"/>"
        << "<text x=\"36\" y=\"" << fixed(y + 4) << "\">" << xml_escape(layers[i].name) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

void write_zonotope_off(std::ostream& out, const WrenchZonotope& z) {
  const auto& v = z.vertices();
  const auto& f = z.faces();
  out << "OFF\n" << v.size() << ' ' << f.size() << " 0\n";
  for (const auto& p : v)
    out << full_precision(p.x()) << ' ' << full_precision(p.y()) << ' ' << full_precision(p.z()) << '\n';
  for (const auto& face : f) out << "3 " << face.v[0] << ' ' << face.v[1] << ' ' << face.v[2] << '\n';
}

}  // namespace pmw
