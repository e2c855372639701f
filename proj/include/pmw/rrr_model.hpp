#pragma once
// Planar parallel manipulator with k RRR legs whose first two joints are
// actuated (the 3-RRR case study has k = 3). Per leg j:
//   a_j  base point          u_j  proximal link (A_j -> B_j)
//   r_j  attachment offset   v_j  distal link   (B_j -> C_j)
// with loop closure p + r_j = a_j + u_j + v_j.
//
// Joint order is (theta_1j, theta_2j) per leg, legs in order: the torque
// vector is (tau_11, tau_21, tau_12, tau_22, ...). theta_1j is absolute from
// the base x-axis; theta_2j is the distal angle relative to the proximal link.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pmw/graspcore.hpp"

namespace pmw {

/// (fx, fy, mz) in N, N, N*m.
using PlanarWrench = Vec3;

struct LegGeometry {
  Vec2 base = Vec2::Zero();
  double proximal = 0.0;
  double distal = 0.0;
  Vec2 attachment = Vec2::Zero();  // mobile frame, relative to the CoM origin O'
};

struct ManipulatorModel {
  std::vector<LegGeometry> legs;
  std::optional<RigidBodyInertia> ee_inertia;

  void validate() const;
};

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;  // rad
};

/// Sign of the relative elbow angle per leg: +1 -> theta_2 in (0, pi),
/// -1 -> theta_2 in (-pi, 0).
using BranchConfig = std::vector<int>;

struct LegState {
  double theta1 = 0.0;  // [0, 2pi)
  double theta2 = 0.0;  // (-pi, pi]
  Vec2 base = Vec2::Zero();
  Vec2 u = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  Vec2 r = Vec2::Zero();  // attachment offset in the base frame
};

struct Jacobians {
  Matrix j;  // 2k x 3
  Matrix k;  // 2k x 2k, block diagonal
};

/// Immutable solved configuration with its Jacobians and force basis.
class ManipulatorState {
 public:
  /// Assembles J, K, B from solved link vectors; throws Singular when K is not invertible.
  static ManipulatorState from_legs(const Pose& pose, std::vector<LegState> legs);

  const Pose& pose() const noexcept { return pose_; }
  const std::vector<LegState>& legs() const noexcept { return legs_; }
  std::size_t leg_count() const noexcept { return legs_.size(); }
  std::size_t actuator_count() const noexcept { return 2 * legs_.size(); }

  const Matrix& j() const noexcept { return j_; }
  const Matrix& k() const noexcept { return k_; }
  const Matrix& basis() const noexcept { return b_; }
  /// J^T K^{-T}: joint torques to resultant wrench (3 x 2k).
  const Matrix& wrench_map() const noexcept { return map_; }
  /// B K^{-T}: joint torques to stacked applied forces (2k x 2k).
  const Matrix& force_map() const noexcept { return force_map_; }

  /// Planar pure-force grasp system at the attachment points r_j.
  GraspSystem grasp_system() const;

 private:
  ManipulatorState() = default;

  Pose pose_;
  std::vector<LegState> legs_;
  Matrix j_, k_, b_, map_, force_map_;
};

/// Closes every leg at the given pose. Throws Unreachable / Singular tagged with the leg index.
ManipulatorState inverse_kinematics(const ManipulatorModel& model, const Pose& pose, const BranchConfig& branches);

/// Rows per leg: [v^T, v^T E r] and [(u+v)^T, (u+v)^T E r]; K blocks
/// diag(v^T E u, v^T E^T u); the second entry is |u||v| sin(-theta_2).
Jacobians build_jacobians(std::span<const LegState> legs);

/// Per leg, columns v_j and u_j + v_j in that leg's two-row band.
Matrix build_basis_matrix(std::span<const LegState> legs);

/// h_o = J^T K^{-T} tau.
PlanarWrench forward_force(const ManipulatorState& state, const Vector& tau);

/// f = B K^{-T} tau, one planar force per attachment point.
WrenchSet applied_forces(const ManipulatorState& state, const Vector& tau);

/// tau / (v^T E u): intensity of the force along v produced by a base-joint torque.
double transmission_weight(const Vec2& u, const Vec2& v, double tau);

struct DeterminacyReport {
  bool determined = false;
  std::vector<int> deficient_legs;  // zero-based
  std::string diagnostic;
};

/// A leg is statically determined when it has exactly as many actuators as
/// force components it transmits (2 planar, 3 spatial).
DeterminacyReport static_determinacy_check(const ManipulatorModel& model, std::span<const int> actuated_per_leg,
                                           int force_components = 2);

}  // namespace pmw
