#pragma once
// Joint-torque synthesis for redundantly actuated manipulators. Every method
// is a weighted minimum-norm inverse of the wrench map A = J^T K^{-T}:
//   MinTorqueNorm  min tau^T tau                        (unweighted)
//   Equilibrating  min f^T f       = tau^T W_e tau,  W_e = K^{-1} B^T B K^{-T}
//   Manipulating   min h^T M^-1 h  = tau^T W_m tau,  W_m = K^{-1} B^T M^{-1} B K^{-T}
// The weighted forms turn the torque-space norm into the norm of the forces
// actually applied to the end-effector.

#include <optional>
#include <string_view>

#include "pmw/rrr_model.hpp"

namespace pmw {

enum class SynthesisMethod { MinTorqueNorm, Equilibrating, Manipulating, General };
enum class InverseChoice { Unweighted, Equilibrating, Manipulating };

std::string_view to_string(SynthesisMethod m);
std::string_view to_string(InverseChoice c);

struct SynthesisDiagnostics {
  double wrench_residual = 0.0;               // ||A tau - h_o|| / max(||h_o||, floor)
  double max_interaction_residual = 0.0;      // absolute, N*m
  double normalized_interaction_residual = 0.0;
  std::optional<double> constraint_wrench_norm;  // needs a virtual-inertia distribution
};

struct SynthesisResult {
  Vector tau;
  SynthesisMethod method = SynthesisMethod::MinTorqueNorm;
  PlanarWrench realized = PlanarWrench::Zero();
  WrenchSet forces;
  SynthesisDiagnostics diagnostics;
};

/// K^{-1} B^T B K^{-T}.
WeightingMatrix equilibrating_weight(const ManipulatorState& state);

/// K^{-1} B^T M^{-1} B K^{-T} with M = blockdiag(m*_j I_2).
WeightingMatrix manipulating_weight(const ManipulatorState& state, const VirtualInertiaDistribution& virt);

/// Generalized inverse of the wrench map for the chosen weighting. `virt` is
/// required for Manipulating.
Matrix wrench_map_inverse(const ManipulatorState& state, InverseChoice choice,
                          const VirtualInertiaDistribution* virt = nullptr);

SynthesisResult min_torque_norm(const ManipulatorState& state, const PlanarWrench& h_o,
                                const VirtualInertiaDistribution* virt = nullptr);

SynthesisResult equilibrating_torques(const ManipulatorState& state, const PlanarWrench& h_o,
                                      const VirtualInertiaDistribution* virt = nullptr);

SynthesisResult manipulating_torques(const ManipulatorState& state, const VirtualInertiaDistribution& virt,
                                     const PlanarWrench& h_o);

/// A^+ h_o + (I - A^+ A) z for the chosen inverse.
SynthesisResult general_resolution(const ManipulatorState& state, const PlanarWrench& h_o, InverseChoice choice,
                                   const Vector& z, const VirtualInertiaDistribution* virt = nullptr);

/// Diagnostics and force breakdown for an arbitrary torque vector.
SynthesisResult evaluate_torques(const ManipulatorState& state, const Vector& tau, SynthesisMethod method,
                                 const VirtualInertiaDistribution* virt = nullptr);

}  // namespace pmw
