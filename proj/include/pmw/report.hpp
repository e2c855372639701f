#pragma once
// Command implementations behind the CLI. Each builds a JSON run report:
// the scene echoed at full precision, results rounded to 6 significant
// digits, and paths of any files written. Every numeric field is finite.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmw/scene.hpp"
#include "pmw/synthesis.hpp"

namespace pmw {

/// Round to `digits` significant digits (decimal).
double round_significant(double v, int digits = 6);

struct SynthRequest {
  SynthesisMethod method = SynthesisMethod::MinTorqueNorm;
  std::optional<PlanarWrench> wrench;  // overrides the scene task wrench
  InverseChoice general_inverse = InverseChoice::Unweighted;
  std::optional<Vector> null_vector;   // general only; zero when absent
};

/// Throws StaticallyIndeterminate for Equilibrating/Manipulating when a leg
/// lacks exactly two actuators. Min-norm accepts partial actuation: joints
/// beyond a leg's actuated count carry zero torque.
nlohmann::json synth_report(const Scene& scene, const SynthRequest& request);

/// Realized wrench, applied forces, pairwise residuals and the constraint
/// wrench against the scene's virtual inertia.
nlohmann::json analyze_report(const Scene& scene, const Vector& tau);

struct PolygonRequest {
  std::vector<InverseChoice> methods{InverseChoice::Unweighted, InverseChoice::Equilibrating};
  double mz = 0.0;
  std::size_t n_dirs = 720;
  std::vector<std::string> formats{"csv"};  // subset of csv, svg, off
  std::filesystem::path out_dir = ".";
};

/// Scaling polygons for each method, the zonotope slice at mz, and pairwise
/// intersections of the scaling polygons. Scaling methods require mz == 0.
nlohmann::json polygon_report(const Scene& scene, const PolygonRequest& request);

/// Throws InvalidArgument when any number in `j` is not finite.
void require_finite(const nlohmann::json& j);

std::optional<SynthesisMethod> parse_method(const std::string& name);
std::optional<InverseChoice> parse_inverse(const std::string& name);

}  // namespace pmw
