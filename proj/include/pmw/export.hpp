#pragma once
// Text exports for polygons and zonotopes. CSV and OFF carry full double
// precision (%.17g) so files re-read bit-exactly.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pmw/wrenchspace.hpp"

namespace pmw {

/// "fx,fy" header, then one vertex per line in polygon order.
void write_polygon_csv(std::ostream& out, const ForcePolygon& poly);

struct SvgLayer {
  std::string name;  // legend label and layer id
  ForcePolygon polygon;
};

/// Overlay of closed polygons, one <g> layer each, with axes in N and a legend.
/// `marker` draws a dot (e.g. the task wrench) on top.
void write_polygon_svg(std::ostream& out, const std::vector<SvgLayer>& layers,
                       const std::optional<Vec2>& marker = std::nullopt);

/// OFF mesh: zonotope corners and triangular faces.
void write_zonotope_off(std::ostream& out, const WrenchZonotope& z);

/// printf-style %.17g.
std::string full_precision(double v);

}  // namespace pmw
