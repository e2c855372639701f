#pragma once
// Scene files: JSON with a units header. Lengths m, angles deg, torques N*m,
// forces N, masses kg. Angles are converted to radians on use only, so a
// scene written back out reproduces the file field-for-field.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmw/rrr_model.hpp"

namespace pmw {

inline constexpr int kSceneSchemaVersion = 1;

struct VirtualInertiaSpec {
  enum class Mode { Solve, Explicit };
  Mode mode = Mode::Solve;
  double total_mass = 1.0;     // Solve
  std::vector<double> masses;  // Explicit, one per leg
};

struct TaskSpec {
  PlanarWrench wrench = PlanarWrench::Zero();
  std::size_t directions = 720;
  double mz = 0.0;
};

struct Scene {
  ManipulatorModel model;
  BranchConfig elbows;
  double pose_x = 0.0;
  double pose_y = 0.0;
  double pose_phi_deg = 0.0;
  double tau_max = 1.0;
  std::vector<int> actuated_per_leg;
  VirtualInertiaSpec virtual_inertia;
  TaskSpec task;

  Pose pose() const;
};

/// Throws Error(ParseError) naming the offending field.
Scene parse_scene(const nlohmann::json& j);
Scene load_scene(const std::filesystem::path& path);
nlohmann::json scene_to_json(const Scene& scene);

/// Field-for-field equality (exact for numbers).
bool operator==(const Scene& a, const Scene& b);

/// Solve mode: masses from the mass-sum and CoM conditions; Explicit:
/// the given masses, validated.
VirtualInertiaDistribution resolve_virtual_inertia(const Scene& scene, const ManipulatorState& state);

/// Bundled scene directory (compile-time default).
std::filesystem::path bundled_scene_dir();

}  // namespace pmw
