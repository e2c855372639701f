#include "pmw/graspcore.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace pmw {

GraspSystem::GraspSystem(std::vector<ContactPoint> points, bool spatial)
    : points_(std::move(points)), spatial_(spatial) {
  if (points_.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "a grasp system needs at least two points");
  for (const auto& p : points_) {
    if (!p.position.allFinite())
      throw Error(ErrorCode::InvalidArgument, "contact position is not finite");
    if (p.model != points_.front().model)
      throw Error(ErrorCode::ModelMismatch, "all contact points must share one contact model");
  }
}

GraspSystem GraspSystem::planar(std::span<const Vec2> points, ContactModel model) {
  std::vector<ContactPoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back({Vec3(p.x(), p.y(), 0.0), model});
  return GraspSystem(std::move(pts), false);
}

int GraspSystem::point_dim() const noexcept {
  return model() == ContactModel::PureForce ? force_dim() : force_dim() + torque_dim();
}

Matrix RigidBodyInertia::generalized() const {
  const int d = planar() ? 2 : 3;
  const auto r = rotational.rows();
  Matrix m = Matrix::Zero(d + r, d + r);
  m.topLeftCorner(d, d).diagonal().setConstant(mass);
  m.bottomRightCorner(r, r) = rotational;
  return m;
}

void RigidBodyInertia::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass))
    throw Error(ErrorCode::InvalidArgument, "body mass must be positive");
  if (!((rotational.rows() == 1 && rotational.cols() == 1) || (rotational.rows() == 3 && rotational.cols() == 3)))
    throw Error(ErrorCode::DimensionMismatch, "rotational inertia must be 1x1 or 3x3");
  WeightingMatrix check(rotational);  // throws unless symmetric positive definite
}

VirtualInertiaDistribution VirtualInertiaDistribution::scaled(double factor) const {
  VirtualInertiaDistribution out = *this;
  for (auto& m : out.masses) m *= factor;
  for (auto& j : out.inertias) j *= factor;
  out.total_mass *= factor;
  out.total_inertia *= factor;
  return out;
}

Matrix build_grasp_matrix(const GraspSystem& system) {
  const int fd = system.force_dim();
  const int td = system.torque_dim();
  const int pd = system.point_dim();
  const bool torques = system.model() == ContactModel::RigidContact;
  Matrix g = Matrix::Zero(fd + td, pd * static_cast<Eigen::Index>(system.size()));
  for (std::size_t i = 0; i < system.size(); ++i) {
    const Eigen::Index c = static_cast<Eigen::Index>(i) * pd;
    g.block(0, c, fd, fd).setIdentity();
    if (system.spatial()) {
      g.block(3, c, 3, 3) = skew(system.points()[i].position);
    } else {
      g.block(2, c, 1, 2) = perp(system.planar_position(i)).transpose();
    }
    if (torques) g.block(fd, c + fd, td, td).setIdentity();
  }
  return g;
}

namespace {

void require_pure_force(const GraspSystem& system) {
  if (system.model() != ContactModel::PureForce)
    throw Error(ErrorCode::ModelMismatch, "interaction forces are defined for pure-force contacts only");
}

void require_set_matches(const WrenchSet& h, const GraspSystem& system) {
  if (h.point_dim != system.point_dim() ||
      h.stacked.size() != static_cast<Eigen::Index>(system.size()) * system.point_dim())
    throw Error(ErrorCode::DimensionMismatch, "wrench set does not match the grasp system");
}

void require_wrench(const Vector& h_o, const GraspSystem& system) {
  if (h_o.size() != system.wrench_dim())
    throw Error(ErrorCode::DimensionMismatch, "resultant wrench has the wrong size");
  if (!h_o.allFinite()) throw Error(ErrorCode::InvalidArgument, "resultant wrench is not finite");
}

Vector position(const GraspSystem& system, std::size_t i) {
  if (system.spatial()) return system.points()[i].position;
  return system.planar_position(i);
}

WrenchSet as_set(Vector stacked, const GraspSystem& system) {
  return WrenchSet{std::move(stacked), system.point_dim()};
}

Matrix zero_rotational(bool spatial) { return Matrix::Zero(spatial ? 3 : 1, spatial ? 3 : 1); }

// sum m_i S(r_i) S(r_i)^T; planar reduces to sum m_i |r_i|^2.
Matrix point_mass_inertia(const GraspSystem& system, std::span<const double> masses) {
  Matrix j = zero_rotational(system.spatial());
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (system.spatial()) {
      const Mat3 s = skew(system.points()[i].position);
      j += masses[i] * s * s.transpose();
    } else {
      j(0, 0) += masses[i] * system.planar_position(i).squaredNorm();
    }
  }
  return j;
}

}  // namespace

std::vector<PairResidual> interaction_residuals(const WrenchSet& forces, const GraspSystem& system) {
  require_pure_force(system);
  require_set_matches(forces, system);
  std::vector<PairResidual> out;
  for (std::size_t i = 0; i < system.size(); ++i)
    for (std::size_t j = i + 1; j < system.size(); ++j) {
      const Vector df = forces.point(j) - forces.point(i);
      const Vector dr = position(system, j) - position(system, i);
      out.push_back({i, j, df.dot(dr)});
    }
  return out;
}

double normalized_interaction_residual(const WrenchSet& forces, const GraspSystem& system) {
  const auto residuals = interaction_residuals(forces, system);
  double worst = 0.0;
  double span = 0.0;
  for (const auto& r : residuals) {
    worst = std::max(worst, std::abs(r.residual));
    span = std::max(span, (position(system, r.j) - position(system, r.i)).norm());
  }
  const double scale = forces.norm() * span;
  return scale > 0.0 ? worst / scale : 0.0;
}

WrenchSet equilibrating_distribution(const GraspSystem& system, const Vector& h_o) {
  require_pure_force(system);
  require_wrench(h_o, system);
  return as_set(mp_pinv(build_grasp_matrix(system)) * h_o, system);
}

VirtualInertiaDistribution solve_virtual_masses(const GraspSystem& system, double total_mass) {
  if (!(total_mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "total virtual mass must be positive");
  const int d = system.force_dim();
  const auto k = static_cast<Eigen::Index>(system.size());

  // Rows: mass sum, then each CoM component.
  Matrix c(1 + d, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    c(0, i) = 1.0;
    c.block(1, i, d, 1) = position(system, static_cast<std::size_t>(i));
  }
  Vector rhs = Vector::Zero(1 + d);
  rhs(0) = total_mass;

  // Minimum-norm least squares; unique when the equations are independent and k = d + 1.
  const Vector m = c.completeOrthogonalDecomposition().solve(rhs);
  const double lever = std::max(c.bottomRows(d).cwiseAbs().maxCoeff(), kAbsFloor);
  const Vector res = c * m - rhs;
  if (std::abs(res(0)) > 1e-9 * total_mass || res.tail(d).norm() > 1e-9 * total_mass * lever)
    throw Error(ErrorCode::NoSolution, "no virtual masses place the CoM at the origin");

  VirtualInertiaDistribution out;
  out.masses.assign(m.data(), m.data() + m.size());
  out.inertias.assign(system.size(), zero_rotational(system.spatial()));
  out.total_mass = total_mass;
  out.total_inertia = point_mass_inertia(system, out.masses);
  out.non_positive_mass =
      std::any_of(out.masses.begin(), out.masses.end(), [&](double mi) { return mi <= 1e-12 * total_mass; });
  return out;
}

void validate_virtual_distribution(const GraspSystem& system, const VirtualInertiaDistribution& virt) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidVirtualDistribution, why); };
  if (virt.masses.size() != system.size() || virt.inertias.size() != system.size())
    fail("element count does not match the grasp system");
  if (!(virt.total_mass > 0.0)) fail("aggregate virtual mass must be positive");
  const Eigen::Index rd = system.spatial() ? 3 : 1;
  for (const auto& j : virt.inertias)
    if (j.rows() != rd || j.cols() != rd) fail("virtual inertia has the wrong shape");
  if (virt.total_inertia.rows() != rd || virt.total_inertia.cols() != rd) fail("aggregate inertia has the wrong shape");

  double sum = 0.0;
  Vector com = Vector::Zero(system.force_dim());
  double lever = kAbsFloor;
  for (std::size_t i = 0; i < system.size(); ++i) {
    sum += virt.masses[i];
    com += virt.masses[i] * position(system, i);
    lever = std::max(lever, position(system, i).norm());
  }
  if (!approx_equal(sum, virt.total_mass, 1e-9)) fail("virtual masses do not sum to the aggregate");
  if (com.norm() > 1e-9 * virt.total_mass * lever) fail("virtual CoM is not at the origin");

  const Matrix point_part = point_mass_inertia(system, virt.masses);
  Matrix expected = point_part;
  for (const auto& j : virt.inertias) expected += j;
  if (!approx_equal(expected, virt.total_inertia, 1e-9, 1e-12 * std::max(1.0, expected.norm())))
    fail("aggregate inertia violates inertia equivalence");

  if (system.spatial()) {
    // Every element inertia and the point-mass part must be multiples of J*_o.
    const Matrix& jo = virt.total_inertia;
    const double jo2 = jo.squaredNorm();
    if (jo2 <= 0.0) fail("aggregate inertia is zero");
    auto proportional = [&](const Matrix& x) {
      const double c = (x.array() * jo.array()).sum() / jo2;
      return (x - c * jo).norm() <= 1e-9 * std::max(x.norm(), jo.norm());
    };
    if (!proportional(point_part)) fail("point-mass inertia is not proportional to the aggregate");
    for (const auto& j : virt.inertias)
      if (!proportional(j)) fail("element inertia is not proportional to the aggregate");
  }
}

Matrix system_inertia_matrix(const GraspSystem& system, const VirtualInertiaDistribution& virt) {
  const int fd = system.force_dim();
  const int pd = system.point_dim();
  const bool torques = system.model() == ContactModel::RigidContact;
  const auto n = static_cast<Eigen::Index>(system.size()) * pd;
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < system.size(); ++i) {
    const Eigen::Index c = static_cast<Eigen::Index>(i) * pd;
    m.block(c, c, fd, fd).diagonal().setConstant(virt.masses[i]);
    if (torques) m.block(c + fd, c + fd, system.torque_dim(), system.torque_dim()) = virt.inertias[i];
  }
  return m;
}

Matrix parametrized_grasp_inverse(const GraspSystem& system, const VirtualInertiaDistribution& virt) {
  validate_virtual_distribution(system, virt);
  const int fd = system.force_dim();
  const int td = system.torque_dim();
  const int pd = system.point_dim();
  const bool torques = system.model() == ContactModel::RigidContact;

  Eigen::FullPivLU<Matrix> jo(virt.total_inertia);
  if (!jo.isInvertible() || jo.rcond() < kMinReciprocalCondition)
    throw Error(ErrorCode::RankDeficient, "aggregate virtual inertia is singular");
  const Matrix jo_inv = jo.inverse();

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(system.size()) * pd, fd + td);
  for (std::size_t i = 0; i < system.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i) * pd;
    const double mi = virt.masses[i];
    out.block(r, 0, fd, fd).diagonal().setConstant(mi / virt.total_mass);
    if (system.spatial()) {
      out.block(r, fd, 3, 3) = mi * skew(system.points()[i].position).transpose() * jo_inv;
    } else {
      out.block(r, fd, 2, 1) = mi * perp(system.planar_position(i)) * jo_inv(0, 0);
    }
    if (torques) out.block(r + fd, fd, td, td) = virt.inertias[i] * jo_inv;
  }
  return out;
}

WrenchSet manipulating_distribution(const GraspSystem& system, const VirtualInertiaDistribution& virt,
                                    const Vector& h_o) {
  require_wrench(h_o, system);
  validate_virtual_distribution(system, virt);
  const Matrix g = build_grasp_matrix(system);
  const Matrix m = system_inertia_matrix(system, virt);
  return as_set(pinv_with_inverse_weight(g, m) * h_o, system);
}

Vector rigid_body_acceleration(const RigidBodyInertia& inertia, const Vector& h_o) {
  inertia.validate();
  const int d = inertia.planar() ? 2 : 3;
  const auto r = inertia.rotational.rows();
  if (h_o.size() != d + r) throw Error(ErrorCode::DimensionMismatch, "wrench does not match the inertia");
  Vector acc(d + r);
  acc.head(d) = h_o.head(d) / inertia.mass;
  acc.tail(r) = inertia.rotational.llt().solve(h_o.tail(r));
  return acc;
}

Vector rigid_body_point_acceleration(const RigidBodyInertia& inertia, const Vector& h_o, const Vec3& point) {
  const Vector acc = rigid_body_acceleration(inertia, h_o);
  if (inertia.planar()) return acc.head<2>() + acc(2) * perp(point.head<2>());
  return acc.head<3>() + acc.tail<3>().cross(point);
}

std::vector<Vector> lmie_unconstrained_accelerations(std::span<const LumpedElement> elements, const WrenchSet& h) {
  if (h.count() != elements.size() || h.stacked.size() % h.point_dim != 0)
    throw Error(ErrorCode::DimensionMismatch, "one wrench per element is required");
  std::vector<Vector> out;
  out.reserve(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    const int rd = static_cast<int>(e.rotational.rows());
    const int fd = rd == 1 ? 2 : 3;
    if (h.point_dim != fd && h.point_dim != fd + rd)
      throw Error(ErrorCode::DimensionMismatch, "wrench size does not match the element");
    if (e.mass == 0.0) throw Error(ErrorCode::ZeroMassElement, "element " + std::to_string(i) + " has zero mass");
    const Vector hi = h.point(i);
    Vector acc(h.point_dim);
    acc.head(fd) = hi.head(fd) / e.mass;
    if (h.point_dim > fd) {
      Eigen::FullPivLU<Matrix> lu(e.rotational);
      if (!lu.isInvertible()) throw Error(ErrorCode::Singular, "element rotational inertia is singular");
      acc.tail(rd) = lu.solve(hi.tail(rd));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<LumpedElement> virtual_elements(const GraspSystem& system, const VirtualInertiaDistribution& virt) {
  if (virt.size() != system.size()) throw Error(ErrorCode::DimensionMismatch, "element count mismatch");
  std::vector<LumpedElement> out;
  for (std::size_t i = 0; i < system.size(); ++i)
    out.push_back({virt.masses[i], virt.inertias[i], system.points()[i].position});
  return out;
}

ConstraintSystem kinematic_constraint_system(std::span<const Vec3> points, const Vec3& omega, bool spatial) {
  if (points.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least two points are required");
  const Eigen::Index k = static_cast<Eigen::Index>(points.size());
  const Eigen::Index ed = spatial ? 6 : 3;  // per-element acceleration size
  const Eigen::Index ld = spatial ? 3 : 2;  // linear part
  const Eigen::Index ad = ed - ld;          // angular part
  ConstraintSystem cs{Matrix::Zero((k - 1) * ed, k * ed), Vector::Zero((k - 1) * ed)};
  for (Eigen::Index i = 1; i < k; ++i) {
    const Eigen::Index row = (i - 1) * ed;
    const Eigen::Index col = i * ed;
    const Vec3 rel = points[static_cast<std::size_t>(i)] - points[0];
    cs.a.block(row, 0, ld, ld) = -Matrix::Identity(ld, ld);
    cs.a.block(row, col, ld, ld).setIdentity();
    cs.a.block(row + ld, ld, ad, ad) = -Matrix::Identity(ad, ad);
    cs.a.block(row + ld, col + ld, ad, ad).setIdentity();
    if (spatial) {
      cs.a.block(row, ld, 3, 3) = skew(rel);
      const Mat3 sw = skew(omega);
      cs.b.segment(row, 3) = sw * sw * rel;
    } else {
      const Vec2 r2 = rel.head<2>();
      cs.a.block(row, ld, 2, 1) = -perp(r2);
      cs.b.segment(row, 2) = -omega.z() * omega.z() * r2;
    }
  }
  return cs;
}

WrenchSet check_manipulating(const GraspSystem& system, const VirtualInertiaDistribution& virt, const WrenchSet& h,
                             const Vector& h_o) {
  require_set_matches(h, system);
  require_wrench(h_o, system);
  const Matrix g = build_grasp_matrix(system);
  const double scale = std::max({h_o.norm(), g.norm() * h.norm(), kAbsFloor});
  if ((g * h.stacked - h_o).norm() > 1e-9 * scale)
    throw Error(ErrorCode::InvalidArgument, "wrench set does not balance the resultant");
  const WrenchSet hm = manipulating_distribution(system, virt, h_o);
  return as_set(hm.stacked - h.stacked, system);
}

DynamicEquivalenceReport check_dynamic_equivalence(const LmieSet& set, const RigidBodyInertia& body) {
  DynamicEquivalenceReport rep;
  const Eigen::Index rd = set.spatial ? 3 : 1;
  double sum = 0.0;
  Vec3 com = Vec3::Zero();
  Matrix inertia = Matrix::Zero(rd, rd);
  for (const auto& e : set.elements) {
    if (e.rotational.rows() != rd || e.rotational.cols() != rd)
      throw Error(ErrorCode::DimensionMismatch, "element inertia has the wrong shape");
    sum += e.mass;
    Vec3 r = e.position;
    if (!set.spatial) r.z() = 0.0;
    com += e.mass * r;
    inertia += e.rotational;
    if (set.spatial) {
      const Mat3 s = skew(r);
      inertia += e.mass * s * s.transpose();
    } else {
      inertia(0, 0) += e.mass * r.squaredNorm();
    }
  }
  if (body.rotational.rows() != rd) throw Error(ErrorCode::DimensionMismatch, "body inertia has the wrong shape");
  rep.mass_residual = sum - body.mass;
  rep.inertia_residual = (inertia - body.rotational).norm();
  rep.com_residual = com.norm();
  return rep;
}

}  // namespace pmw
