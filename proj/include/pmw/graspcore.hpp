#pragma once
// Grasp-matrix statics and the two characterizations of null-space wrenches:
// interaction forces (pairwise geometric condition, unweighted minimum norm)
// and internal loads (constraint wrenches of a dynamically equivalent system
// of lumped elements, inertia-weighted minimum norm).
//
// Spatial systems stack 3-vector forces (and torques); planar systems stack
// 2-vector forces (and scalar moments) and use the x/y components of every
// position. Resultant wrenches are (f, t): 6 entries spatial, 3 planar.

#include <cmath>
#include <span>
#include <vector>

#include "pmw/numkernel.hpp"

namespace pmw {

enum class ContactModel { PureForce, RigidContact };

struct ContactPoint {
  Vec3 position = Vec3::Zero();  // relative to the body CoM, metres
  ContactModel model = ContactModel::PureForce;
};

class GraspSystem {
 public:
  GraspSystem(std::vector<ContactPoint> points, bool spatial);

  static GraspSystem planar(std::span<const Vec2> points,
                            ContactModel model = ContactModel::PureForce);

  const std::vector<ContactPoint>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool spatial() const noexcept { return spatial_; }
  ContactModel model() const noexcept { return points_.front().model; }

  /// Force components per point: 3 spatial, 2 planar.
  int force_dim() const noexcept { return spatial_ ? 3 : 2; }
  /// Torque components per point: 3 spatial, 1 planar.
  int torque_dim() const noexcept { return spatial_ ? 3 : 1; }
  /// Entries per point in a stacked wrench vector.
  int point_dim() const noexcept;
  /// Entries of the resultant wrench: 6 spatial, 3 planar.
  int wrench_dim() const noexcept { return force_dim() + torque_dim(); }

  Vec2 planar_position(std::size_t i) const { return points_[i].position.head<2>(); }

 private:
  std::vector<ContactPoint> points_;
  bool spatial_;
};

/// Stacked per-point wrenches.
struct WrenchSet {
  Vector stacked;
  int point_dim = 2;

  std::size_t count() const { return static_cast<std::size_t>(stacked.size() / point_dim); }
  auto point(std::size_t i) const { return stacked.segment(static_cast<Eigen::Index>(i) * point_dim, point_dim); }
  double norm() const { return stacked.norm(); }
};

/// Translational mass plus rotational inertia (3x3 spatial, 1x1 planar).
struct RigidBodyInertia {
  double mass = 1.0;
  Matrix rotational = Matrix::Identity(3, 3);

  bool planar() const { return rotational.rows() == 1; }
  /// Generalized inertia blockdiag(m I, J).
  Matrix generalized() const;
  void validate() const;
};

struct LumpedElement {
  double mass = 0.0;
  Matrix rotational;  // 3x3 or 1x1; zero for pure-force elements
  Vec3 position = Vec3::Zero();
};

struct LmieSet {
  std::vector<LumpedElement> elements;
  bool spatial = false;
};

/// Virtual masses/inertias spanning the manipulating-distribution solutions.
struct VirtualInertiaDistribution {
  std::vector<double> masses;
  std::vector<Matrix> inertias;  // per element, 3x3 or 1x1
  double total_mass = 0.0;
  Matrix total_inertia;          // aggregate from the inertia-equivalence sum
  bool non_positive_mass = false;  // warning only; no sign constraint exists

  std::size_t size() const { return masses.size(); }
  VirtualInertiaDistribution scaled(double factor) const;
};

struct PairResidual {
  std::size_t i = 0;
  std::size_t j = 0;
  double residual = 0.0;  // (f_j - f_i) . (r_j - r_i)
};

struct ConstraintSystem {
  Matrix a;
  Vector b;
};

struct DynamicEquivalenceReport {
  double mass_residual = 0.0;     // sum m_i - m_o
  double inertia_residual = 0.0;  // Frobenius norm of the inertia mismatch
  double com_residual = 0.0;      // || sum r_i m_i ||
  bool holds(double tol) const {
    return std::abs(mass_residual) <= tol && inertia_residual <= tol && com_residual <= tol;
  }
};

Matrix build_grasp_matrix(const GraspSystem& system);

/// All unordered pairs i < j in lexicographic order.
std::vector<PairResidual> interaction_residuals(const WrenchSet& forces, const GraspSystem& system);

/// max |residual| / (||f|| * max ||r_j - r_i||); zero for zero forces.
double normalized_interaction_residual(const WrenchSet& forces, const GraspSystem& system);

/// G^dagger h_o: the force set free of interaction forces.
WrenchSet equilibrating_distribution(const GraspSystem& system, const Vector& h_o);

/// Solves the mass-sum and CoM conditions for the virtual masses. Pure-force
/// elements carry zero virtual inertia.
VirtualInertiaDistribution solve_virtual_masses(const GraspSystem& system, double total_mass = 1.0);

/// Throws InvalidVirtualDistribution when the equivalence conditions fail.
void validate_virtual_distribution(const GraspSystem& system, const VirtualInertiaDistribution& virt);

/// Block-diagonal system inertia of the lumped elements.
Matrix system_inertia_matrix(const GraspSystem& system, const VirtualInertiaDistribution& virt);

/// Closed-form parametrized pseudo-inverse of G built from the virtual inertia.
Matrix parametrized_grasp_inverse(const GraspSystem& system, const VirtualInertiaDistribution& virt);

/// M G^T (G M G^T)^{-1} h_o: the wrench set free of internal loads.
WrenchSet manipulating_distribution(const GraspSystem& system, const VirtualInertiaDistribution& virt,
                                    const Vector& h_o);

Vector rigid_body_acceleration(const RigidBodyInertia& inertia, const Vector& h_o);

/// Acceleration field of a rigid body at `point` (linear part) for zero
/// angular velocity: p'' = a_o + alpha x r.
Vector rigid_body_point_acceleration(const RigidBodyInertia& inertia, const Vector& h_o, const Vec3& point);

/// M_i^{-1} h_i per element. Pure-force wrench sets yield linear accelerations only.
std::vector<Vector> lmie_unconstrained_accelerations(std::span<const LumpedElement> elements,
                                                     const WrenchSet& h);

std::vector<LumpedElement> virtual_elements(const GraspSystem& system, const VirtualInertiaDistribution& virt);

/// Rigid-body acceleration constraints A x'' = b between every element and
/// element 1. Per element x'' = (p'', omega') with 6 entries spatial and 3
/// planar (omega.z() is the planar angular velocity).
ConstraintSystem kinematic_constraint_system(std::span<const Vec3> points, const Vec3& omega, bool spatial);

/// h_c = h_m - h. h is manipulating iff h_c vanishes.
WrenchSet check_manipulating(const GraspSystem& system, const VirtualInertiaDistribution& virt,
                             const WrenchSet& h, const Vector& h_o);

DynamicEquivalenceReport check_dynamic_equivalence(const LmieSet& set, const RigidBodyInertia& body);

}  // namespace pmw
