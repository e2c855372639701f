#include "pmw/rrr_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pmw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double wrap_positive(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0.0 ? a + kTwoPi : a;
}

double wrap_signed(double a) {
  a = std::remainder(a, kTwoPi);
  return a <= -std::numbers::pi ? a + kTwoPi : a;
}

Vec2 rotate(const Vec2& p, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

}  // namespace

void ManipulatorModel::validate() const {
  if (legs.size() < 2) throw Error(ErrorCode::InvalidArgument, "a parallel manipulator needs at least two legs");
  for (std::size_t j = 0; j < legs.size(); ++j) {
    const auto& l = legs[j];
    if (!(l.proximal > 0.0) || !(l.distal > 0.0))
      throw Error(ErrorCode::InvalidArgument, "link lengths must be positive", static_cast<int>(j));
    if (!l.base.allFinite() || !l.attachment.allFinite())
      throw Error(ErrorCode::InvalidArgument, "leg geometry is not finite", static_cast<int>(j));
  }
  if (legs.size() >= 3) {
    bool collinear = true;
    const Vec2 d0 = legs[1].base - legs[0].base;
    for (std::size_t j = 2; j < legs.size() && collinear; ++j)
      collinear = std::abs(cross2(d0, legs[j].base - legs[0].base)) <= 1e-12;
    if (collinear) throw Error(ErrorCode::InvalidArgument, "base points are collinear");
  }
  if (ee_inertia) ee_inertia->validate();
}

ManipulatorState ManipulatorState::from_legs(const Pose& pose, std::vector<LegState> legs) {
  ManipulatorState s;
  s.pose_ = pose;
  s.legs_ = std::move(legs);
  auto jk = build_jacobians(s.legs_);
  s.j_ = std::move(jk.j);
  s.k_ = std::move(jk.k);
  s.b_ = build_basis_matrix(s.legs_);
  // K is diagonal, so K^{-T} is the reciprocal diagonal.
  const Vector k_inv = s.k_.diagonal().cwiseInverse();
  s.map_ = s.j_.transpose() * k_inv.asDiagonal();
  s.force_map_ = s.b_ * k_inv.asDiagonal();
  return s;
}

GraspSystem ManipulatorState::grasp_system() const {
  std::vector<Vec2> pts;
  for (const auto& l : legs_) pts.push_back(l.r);
  return GraspSystem::planar(pts);
}

ManipulatorState inverse_kinematics(const ManipulatorModel& model, const Pose& pose, const BranchConfig& branches) {
  model.validate();
  if (branches.size() != model.legs.size())
    throw Error(ErrorCode::InvalidArgument, "one elbow sign per leg is required");
  if (!std::isfinite(pose.x) || !std::isfinite(pose.y) || !std::isfinite(pose.phi))
    throw Error(ErrorCode::InvalidArgument, "pose is not finite");

  const Vec2 p(pose.x, pose.y);
  std::vector<LegState> legs;
  for (std::size_t j = 0; j < model.legs.size(); ++j) {
    const auto& g = model.legs[j];
    const int leg = static_cast<int>(j);
    const int sign = branches[j];
    if (sign != 1 && sign != -1) throw Error(ErrorCode::InvalidArgument, "elbow sign must be +1 or -1", leg);

    LegState s;
    s.base = g.base;
    s.r = rotate(g.attachment, pose.phi);
    const Vec2 d = p + s.r - g.base;
    const double dist = d.norm();
    const double outer = g.proximal + g.distal;
    const double inner = std::abs(g.proximal - g.distal);
    const double tol = 1e-12 * outer;
    if (dist > outer + tol || dist < inner - tol)
      throw Error(ErrorCode::Unreachable, "leg " + std::to_string(j + 1) + " cannot reach the pose", leg);
    if (std::abs(dist - outer) <= tol || std::abs(dist - inner) <= tol)
      throw Error(ErrorCode::Singular, "leg " + std::to_string(j + 1) + " is fully extended or folded", leg);

    // Angle at A_j between A_jC_j and the proximal link.
    const double cos_a = (g.proximal * g.proximal + dist * dist - g.distal * g.distal) / (2.0 * g.proximal * dist);
    const double alpha = std::acos(std::clamp(cos_a, -1.0, 1.0));
    const double theta1 = std::atan2(d.y(), d.x()) - sign * alpha;
    s.u = g.proximal * Vec2(std::cos(theta1), std::sin(theta1));
    s.v = d - s.u;
    s.theta1 = wrap_positive(theta1);
    s.theta2 = wrap_signed(std::atan2(s.v.y(), s.v.x()) - theta1);
    legs.push_back(s);
  }
  return ManipulatorState::from_legs(pose, std::move(legs));
}

Jacobians build_jacobians(std::span<const LegState> legs) {
  const auto k = static_cast<Eigen::Index>(legs.size());
  Jacobians out{Matrix::Zero(2 * k, 3), Matrix::Zero(2 * k, 2 * k)};
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& l = legs[static_cast<std::size_t>(j)];
    const Vec2 w = l.u + l.v;
    const Vec2 er = perp(l.r);
    out.j.row(2 * j) << l.v.x(), l.v.y(), l.v.dot(er);
    out.j.row(2 * j + 1) << w.x(), w.y(), w.dot(er);

    const double k11 = l.v.dot(perp(l.u));
    // |u||v| sin(theta'_2) with theta'_2 = -theta_2 measured from v to u; positive
    // on the elbow branch theta_2 < 0.
    const double k22 = cross2(l.v, l.u);
    const double scale = l.u.norm() * l.v.norm();
    if (std::abs(k11) < 1e-12 * std::max(scale, 1.0) || std::abs(k22) < 1e-12 * std::max(scale, 1.0))
      throw Error(ErrorCode::Singular, "leg " + std::to_string(j + 1) + " Jacobian K is singular", static_cast<int>(j));
    out.k(2 * j, 2 * j) = k11;
    out.k(2 * j + 1, 2 * j + 1) = k22;
  }
  return out;
}

Matrix build_basis_matrix(std::span<const LegState> legs) {
  const auto k = static_cast<Eigen::Index>(legs.size());
  Matrix b = Matrix::Zero(2 * k, 2 * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& l = legs[static_cast<std::size_t>(j)];
    b.block<2, 1>(2 * j, 2 * j) = l.v;
    b.block<2, 1>(2 * j, 2 * j + 1) = l.u + l.v;
  }
  return b;
}

namespace {
void require_torques(const ManipulatorState& state, const Vector& tau) {
  if (tau.size() != static_cast<Eigen::Index>(state.actuator_count()))
    throw Error(ErrorCode::DimensionMismatch, "torque vector must have one entry per actuator");
}
}  // namespace

PlanarWrench forward_force(const ManipulatorState& state, const Vector& tau) {
  require_torques(state, tau);
  return state.wrench_map() * tau;
}

WrenchSet applied_forces(const ManipulatorState& state, const Vector& tau) {
  require_torques(state, tau);
  return WrenchSet{state.force_map() * tau, 2};
}

double transmission_weight(const Vec2& u, const Vec2& v, double tau) {
  const double denom = v.dot(perp(u));
  if (std::abs(denom) <= 1e-12)
    throw Error(ErrorCode::Singular, "distal link is aligned with the proximal link");
  return tau / denom;
}

DeterminacyReport static_determinacy_check(const ManipulatorModel& model, std::span<const int> actuated_per_leg,
                                           int force_components) {
  DeterminacyReport rep;
  if (actuated_per_leg.size() != model.legs.size()) {
    rep.diagnostic = "actuator counts given for " + std::to_string(actuated_per_leg.size()) + " legs, model has " +
                     std::to_string(model.legs.size());
    return rep;
  }
  for (std::size_t j = 0; j < actuated_per_leg.size(); ++j)
    if (actuated_per_leg[j] != force_components) rep.deficient_legs.push_back(static_cast<int>(j));
  rep.determined = rep.deficient_legs.empty() && !model.legs.empty();
  if (model.legs.empty()) rep.diagnostic = "model has no legs";
  for (int j : rep.deficient_legs) {
    if (!rep.diagnostic.empty()) rep.diagnostic += "; ";
    const int n = actuated_per_leg[static_cast<std::size_t>(j)];
    rep.diagnostic += "leg " + std::to_string(j + 1) + (n < force_components ? " under-actuated" : " over-actuated") +
                      " (" + std::to_string(n) + " of " + std::to_string(force_components) + " actuators)";
  }
  return rep;
}

}  // namespace pmw
