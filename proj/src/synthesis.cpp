#include "pmw/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace pmw {

std::string_view to_string(SynthesisMethod m) {
  switch (m) {
    case SynthesisMethod::MinTorqueNorm: return "min-norm";
    case SynthesisMethod::Equilibrating: return "equilibrating";
    case SynthesisMethod::Manipulating: return "manipulating";
    case SynthesisMethod::General: return "general";
  }
  return "unknown";
}

std::string_view to_string(InverseChoice c) {
  switch (c) {
    case InverseChoice::Unweighted: return "unweighted";
    case InverseChoice::Equilibrating: return "equilibrating";
    case InverseChoice::Manipulating: return "manipulating";
  }
  return "unknown";
}

namespace {

// Symmetrize to remove round-off asymmetry before the SPD check.
Matrix symmetric(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

WeightingMatrix equilibrating_weight(const ManipulatorState& state) {
  const Matrix bk = state.force_map();  // B K^{-T}
  return WeightingMatrix(symmetric(bk.transpose() * bk));
}

WeightingMatrix manipulating_weight(const ManipulatorState& state, const VirtualInertiaDistribution& virt) {
  const GraspSystem system = state.grasp_system();
  validate_virtual_distribution(system, virt);
  for (double m : virt.masses)
    if (!(m > 0.0))
      throw Error(ErrorCode::InvalidVirtualDistribution, "manipulating weight needs positive virtual masses");
  Vector m_inv(2 * static_cast<Eigen::Index>(virt.size()));
  for (std::size_t j = 0; j < virt.size(); ++j) m_inv.segment<2>(2 * static_cast<Eigen::Index>(j)).setConstant(1.0 / virt.masses[j]);
  const Matrix bk = state.force_map();
  return WeightingMatrix(symmetric(bk.transpose() * m_inv.asDiagonal() * bk));
}

Matrix wrench_map_inverse(const ManipulatorState& state, InverseChoice choice, const VirtualInertiaDistribution* virt) {
  switch (choice) {
    case InverseChoice::Unweighted: return mp_pinv(state.wrench_map());
    case InverseChoice::Equilibrating: return weighted_pinv(state.wrench_map(), equilibrating_weight(state));
    case InverseChoice::Manipulating:
      if (!virt) throw Error(ErrorCode::InvalidVirtualDistribution, "manipulating inverse needs virtual inertia");
      return weighted_pinv(state.wrench_map(), manipulating_weight(state, *virt));
  }
  throw Error(ErrorCode::InvalidArgument, "unknown inverse choice");
}

SynthesisResult evaluate_torques(const ManipulatorState& state, const Vector& tau, SynthesisMethod method,
                                 const VirtualInertiaDistribution* virt) {
  SynthesisResult r;
  r.tau = tau;
  r.method = method;
  r.realized = forward_force(state, tau);
  r.forces = applied_forces(state, tau);
  const GraspSystem system = state.grasp_system();
  for (const auto& p : interaction_residuals(r.forces, system))
    r.diagnostics.max_interaction_residual = std::max(r.diagnostics.max_interaction_residual, std::abs(p.residual));
  r.diagnostics.normalized_interaction_residual = normalized_interaction_residual(r.forces, system);
  if (virt) {
    r.diagnostics.constraint_wrench_norm =
        check_manipulating(system, *virt, r.forces, Vector(r.realized)).norm();
  }
  return r;
}

namespace {

SynthesisResult finish(const ManipulatorState& state, const Vector& tau, SynthesisMethod method,
                       const PlanarWrench& h_o, const VirtualInertiaDistribution* virt) {
  if (!h_o.allFinite()) throw Error(ErrorCode::InvalidArgument, "wrench is not finite");
  SynthesisResult r = evaluate_torques(state, tau, method, virt);
  r.diagnostics.wrench_residual = (r.realized - h_o).norm() / std::max(h_o.norm(), kAbsFloor);
  return r;
}

}  // namespace

SynthesisResult min_torque_norm(const ManipulatorState& state, const PlanarWrench& h_o,
                                const VirtualInertiaDistribution* virt) {
  const Vector tau = wrench_map_inverse(state, InverseChoice::Unweighted) * h_o;
  return finish(state, tau, SynthesisMethod::MinTorqueNorm, h_o, virt);
}

SynthesisResult equilibrating_torques(const ManipulatorState& state, const PlanarWrench& h_o,
                                      const VirtualInertiaDistribution* virt) {
  const Vector tau = wrench_map_inverse(state, InverseChoice::Equilibrating) * h_o;
  return finish(state, tau, SynthesisMethod::Equilibrating, h_o, virt);
}

SynthesisResult manipulating_torques(const ManipulatorState& state, const VirtualInertiaDistribution& virt,
                                     const PlanarWrench& h_o) {
  const Vector tau = wrench_map_inverse(state, InverseChoice::Manipulating, &virt) * h_o;
  return finish(state, tau, SynthesisMethod::Manipulating, h_o, &virt);
}

SynthesisResult general_resolution(const ManipulatorState& state, const PlanarWrench& h_o, InverseChoice choice,
                                   const Vector& z, const VirtualInertiaDistribution* virt) {
  if (z.size() != static_cast<Eigen::Index>(state.actuator_count()))
    throw Error(ErrorCode::DimensionMismatch, "null-space vector must have one entry per actuator");
  const Matrix inv = wrench_map_inverse(state, choice, virt);
  const Vector tau = inv * h_o + nullspace_projector(state.wrench_map(), inv) * z;
  return finish(state, tau, SynthesisMethod::General, h_o, virt);
}

}  // namespace pmw
