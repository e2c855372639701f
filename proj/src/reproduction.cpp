#include "pmw/reproduction.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include <Eigen/LU>
#include <Eigen/QR>

#include "pmw/wrenchspace.hpp"

namespace pmw {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Loaded {
  Scene scene;
  ManipulatorState state;
};

Loaded load(const SuiteOptions& opt, const char* file) {
  Scene s = load_scene(opt.scene_dir / file);
  return {s, inverse_kinematics(s.model, s.pose(), s.elbows)};
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double max_abs_diff(const Vector& a, std::span<const double> b) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a(i) - b[static_cast<std::size_t>(i)]));
  return m;
}

Matrix equilibrating_or_mutant(const ManipulatorState& s, const SuiteOptions& opt) {
  return wrench_map_inverse(s, opt.substitute_unweighted_for_equilibrating ? InverseChoice::Unweighted
                                                                           : InverseChoice::Equilibrating);
}

const PlanarWrench kTaskWrench(1.662, 70.689, 0.0);

// ---- 1 ------------------------------------------------------------------
CriterionResult ik_reproduction(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  constexpr std::array<double, 6> expected = {94.34, -128.68, 214.34, -128.68, 334.34, -128.68};
  double worst = 0.0;
  for (std::size_t j = 0; j < state.leg_count(); ++j) {
    worst = std::max(worst, std::abs(state.legs()[j].theta1 * kDeg - expected[2 * j]));
    worst = std::max(worst, std::abs(state.legs()[j].theta2 * kDeg - expected[2 * j + 1]));
  }
  return {1, "inverse kinematics", worst <= 0.01, fmt("max angle error %.2e deg (tol 1e-2)", worst)};
}

// ---- 2 ------------------------------------------------------------------
CriterionResult min_norm_torques(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const Vector tau = wrench_map_inverse(state, InverseChoice::Unweighted) * kTaskWrench;
  constexpr std::array<double, 6> expected = {2.290, 1.895, -4.200, 1.747, 1.909, -3.641};
  const double err = max_abs_diff(tau, expected);
  return {2, "min-norm torques", err <= 1e-3, fmt("max |tau - ref| %.2e (tol 1e-3)", err)};
}

// ---- 3 ------------------------------------------------------------------
CriterionResult equilibrating_torques_row(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const Vector tau = equilibrating_or_mutant(state, opt) * kTaskWrench;
  constexpr std::array<double, 6> tau_ref = {3.486, 3.954, -3.583, 0.246, 0.096, -4.200};
  constexpr std::array<double, 6> f_ref = {0.554, 23.563, 0.554, 23.563, 0.554, 23.563};
  const double et = max_abs_diff(tau, tau_ref);
  const double ef = max_abs_diff(applied_forces(state, tau).stacked, f_ref);
  return {3, "equilibrating torques", et <= 1e-3 && ef <= 1e-3,
          fmt("max |tau - ref| %.2e, max |f - ref| %.2e (tol 1e-3)", et, ef)};
}

// ---- 4 ------------------------------------------------------------------
CriterionResult interaction_residuals_row(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const GraspSystem sys = state.grasp_system();
  const Vector tau_e = equilibrating_or_mutant(state, opt) * kTaskWrench;
  const Vector tau_min = wrench_map_inverse(state, InverseChoice::Unweighted) * kTaskWrench;
  const double rel_e = normalized_interaction_residual(applied_forces(state, tau_e), sys);
  double abs_min = 0.0;
  for (const auto& p : interaction_residuals(applied_forces(state, tau_min), sys))
    abs_min = std::max(abs_min, std::abs(p.residual));
  return {4, "interaction residuals", rel_e <= 1e-9 && abs_min > 0.1,
          fmt("equilibrating relative %.2e (tol 1e-9), min-norm absolute %.3f (> 0.1)", rel_e, abs_min)};
}

// ---- 5 ------------------------------------------------------------------
CriterionResult modified_end_effector(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "modified_ee.json");
  const PlanarWrench h(-25.0, 25.0, -2.0);
  const auto virt = resolve_virtual_inertia(scene, state);
  const Vector tau_e = equilibrating_or_mutant(state, opt) * h;
  const Vector tau_m = wrench_map_inverse(state, InverseChoice::Manipulating, &virt) * h;
  constexpr std::array<double, 6> te = {2.867, 1.114, 0.367, 2.005, -0.932, -1.968};
  constexpr std::array<double, 6> fe = {-9.810, 13.447, -9.810, 3.220, -5.381, 8.333};
  constexpr std::array<double, 6> tm = {2.319, 0.885, 1.069, 1.561, -1.554, -3.781};
  constexpr std::array<double, 6> fm = {-8.016, 10.834, -8.016, -2.501, -8.969, 16.667};
  const double worst = std::max({max_abs_diff(tau_e, te), max_abs_diff(applied_forces(state, tau_e).stacked, fe),
                                 max_abs_diff(tau_m, tm), max_abs_diff(applied_forces(state, tau_m).stacked, fm)});
  return {5, "modified end-effector", worst <= 1e-3, fmt("max deviation over tau_e, f_e, tau_m, f_m %.2e (tol 1e-3)", worst)};
}

// Mass-weighted least-change correction that makes the element
// accelerations rigid (zero angular velocity). Element rotations are free.
WrenchSet constraint_forces(std::span<const Vec3> points, const std::vector<double>& masses,
                            const WrenchSet& forces) {
  const ConstraintSystem cs = kinematic_constraint_system(points, Vec3::Zero(), false);
  const auto k = static_cast<Eigen::Index>(points.size());
  const Eigen::Index nx = 3 * k;
  Vector a = Vector::Zero(nx);
  Vector w = Vector::Zero(nx);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double m = masses[static_cast<std::size_t>(i)];
    a.segment<2>(3 * i) = forces.point(static_cast<std::size_t>(i)) / m;
    w.segment<2>(3 * i).setConstant(m);
  }
  const Eigen::Index nc = cs.a.rows();
  Matrix kkt = Matrix::Zero(nx + nc, nx + nc);
  kkt.topLeftCorner(nx, nx) = w.asDiagonal();
  kkt.topRightCorner(nx, nc) = cs.a.transpose();
  kkt.bottomLeftCorner(nc, nx) = cs.a;
  Vector rhs = Vector::Zero(nx + nc);
  rhs.tail(nc) = cs.b - cs.a * a;
  const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  WrenchSet fc{Vector::Zero(2 * k), 2};
  for (Eigen::Index i = 0; i < k; ++i) fc.stacked.segment<2>(2 * i) = w(3 * i) * sol.segment<2>(3 * i);
  return fc;
}

// ---- 6 ------------------------------------------------------------------
CriterionResult manipulating_physics(const SuiteOptions& opt) {
  double worst_rel = 0.0, worst_fc = 0.0;
  for (const char* file : {"modified_ee.json", "nokleby_pose.json"}) {
    const auto [scene, state] = load(opt, file);
    const auto virt = resolve_virtual_inertia(scene, state);
    const PlanarWrench h = scene.task.wrench;
    const Vector tau_m = wrench_map_inverse(state, InverseChoice::Manipulating, &virt) * h;
    const WrenchSet f = applied_forces(state, tau_m);
    RigidBodyInertia body;
    body.mass = virt.total_mass;
    body.rotational = virt.total_inertia;
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < state.leg_count(); ++i) {
      const Vec3 r(state.legs()[i].r.x(), state.legs()[i].r.y(), 0.0);
      pts.push_back(r);
      const Vector field = rigid_body_point_acceleration(body, Vector(h), r);
      const Vector acc = f.point(i) / virt.masses[i];
      worst_rel = std::max(worst_rel, (acc - field).norm() / std::max(field.norm(), kAbsFloor));
    }
    worst_fc = std::max(worst_fc, constraint_forces(pts, virt.masses, f).norm());
  }
  return {6, "manipulating distribution physics", worst_rel <= 1e-6 && worst_fc <= 1e-8,
          fmt("max relative field mismatch %.2e (tol 1e-6), constraint force norm %.2e (tol 1e-8)", worst_rel,
              worst_fc)};
}

// ---- 7 ------------------------------------------------------------------
CriterionResult symmetric_identity(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const auto virt = resolve_virtual_inertia(scene, state);
  const Vector tau_e = equilibrating_or_mutant(state, opt) * kTaskWrench;
  const Vector tau_m = wrench_map_inverse(state, InverseChoice::Manipulating, &virt) * kTaskWrench;
  const double err = (tau_e - tau_m).cwiseAbs().maxCoeff();
  return {7, "symmetric-case identity", err <= 1e-9, fmt("max |tau_m - tau_e| %.2e (tol 1e-9)", err)};
}

ForcePolygon scaling_polygon(const ManipulatorState& state, const TorqueBox& box, bool weighted,
                             const SuiteOptions& opt) {
  const auto choice = weighted && !opt.substitute_unweighted_for_equilibrating ? InverseChoice::Equilibrating
                                                                              : InverseChoice::Unweighted;
  return polygon_scaling_method(state, box, 0.0, 720, choice).polygon;
}

// ---- 8 ------------------------------------------------------------------
CriterionResult polygon_topology(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const TorqueBox box(scene.tau_max);
  const ForcePolygon pu = scaling_polygon(state, box, false, opt);
  const ForcePolygon pe = scaling_polygon(state, box, true, opt);
  const auto x = polygon_intersections(pu, pe);
  const Vec2 h = kTaskWrench.head<2>();
  const double gap = std::max(std::abs(polygon_radius(pu, h) - h.norm()), std::abs(polygon_radius(pe, h) - h.norm()));
  const bool pass = x.points.size() == 12 && !x.shared_boundary && gap <= 1e-2;
  return {8, "polygon topology", pass,
          fmt("%g intersections (expect 12), task wrench radial gap %.2e (tol 1e-2)",
              static_cast<double>(x.points.size()), gap)};
}

double max_symmetry_defect(const std::vector<Vec2>& v) {
  double worst = 0.0;
  for (const auto& p : v) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : v) best = std::min(best, (p + q).norm());
    worst = std::max(worst, best);
  }
  return worst;
}

// ---- 9 ------------------------------------------------------------------
CriterionResult zonotope_containment(const SuiteOptions& opt) {
  const auto [scene, state] = load(opt, "nokleby_pose.json");
  const TorqueBox box(scene.tau_max);
  const WrenchZonotope z = feasible_zonotope(state, box);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-box.tau_max(), box.tau_max());
  constexpr int n = 10000;
  Matrix taus(static_cast<Eigen::Index>(state.actuator_count()), n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < taus.rows(); ++r) taus(r, c) = u(rng);
  const auto depth = z.signed_depth_batch(state.wrench_map() * taus);
  const double min_depth = *std::min_element(depth.begin(), depth.end());

  const ForcePolygon slice = slice_zonotope(z, 0.0);
  double poly_depth = std::numeric_limits<double>::infinity();
  for (bool weighted : {false, true})
    for (const auto& v : scaling_polygon(state, box, weighted, opt).vertices)
      poly_depth = std::min(poly_depth, polygon_signed_distance(slice, v));
  const double sym = max_symmetry_defect(slice.vertices);

  const bool pass = min_depth >= -1e-9 && poly_depth >= -1e-6 && sym <= 1e-9;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "min sample depth %.3g (>= -1e-9), min polygon depth in slice %.3g (>= -1e-6), slice symmetry %.1e "
                "(tol 1e-9)",
                min_depth, poly_depth, sym);
  return {9, "zonotope containment", pass, buf};
}

// ---- 10 -----------------------------------------------------------------
struct RandomPoses {
  Scene scene;
  std::mt19937_64& rng;

  // Reachable, well-conditioned pose near the scene pose.
  ManipulatorState next() {
    std::uniform_real_distribution<double> d(-0.04, 0.04), a(-20.0, 20.0);
    for (;;) {
      Pose p = scene.pose();
      p.x += d(rng);
      p.y += d(rng);
      p.phi += a(rng) / kDeg;
      try {
        auto s = inverse_kinematics(scene.model, p, scene.elbows);
        if (condition_number(s.wrench_map()) < 1e6 && condition_number(s.k()) < 1e6) return s;
      } catch (const Error&) {
      }
    }
  }
};

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(rng);
  return m;
}

CriterionResult property_suites(const SuiteOptions& opt) {
  std::mt19937_64 rng(opt.seed + 10);
  std::string detail;
  bool pass = true;
  auto note = [&](bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " FAIL");
  };

  // KKT equivalence of the weighted pseudo-inverse.
  double kkt_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix a = random_matrix(rng, 3, 6);
    const Matrix l = random_matrix(rng, 6, 6);
    const Matrix w = l * l.transpose() + 0.5 * Matrix::Identity(6, 6);
    const Vector b = random_matrix(rng, 3, 1);
    const Vector x = weighted_pinv(a, WeightingMatrix(w)) * b;
    Matrix kkt = Matrix::Zero(9, 9);
    kkt.topLeftCorner(6, 6) = w;
    kkt.topRightCorner(6, 3) = a.transpose();
    kkt.bottomLeftCorner(3, 6) = a;
    Vector rhs = Vector::Zero(9);
    rhs.tail(3) = b;
    const Vector sol = kkt.fullPivLu().solve(rhs);
    kkt_worst = std::max(kkt_worst, (x - sol.head(6)).norm() / std::max(sol.head(6).norm(), kAbsFloor));
  }
  note(kkt_worst < 1e-9, fmt("KKT %.1e", kkt_worst));

  // Null-space perturbations never lower the weighted cost.
  Scene nominal = load_scene(opt.scene_dir / "nokleby_pose.json");
  Scene modified = load_scene(opt.scene_dir / "modified_ee.json");
  RandomPoses poses_a{nominal, rng}, poses_b{modified, rng};
  std::uniform_real_distribution<double> fw(-50.0, 50.0), mw(-5.0, 5.0);
  double grad_worst = 0.0;
  bool cost_ok = true;
  for (int t = 0; t < 100; ++t) {
    const ManipulatorState s = (t % 2 == 0 ? poses_a : poses_b).next();
    const auto virt = solve_virtual_masses(s.grasp_system());
    const PlanarWrench h(fw(rng), fw(rng), mw(rng));
    const std::array<std::pair<InverseChoice, Matrix>, 3> methods = {{
        {InverseChoice::Unweighted, Matrix::Identity(6, 6)},
        {InverseChoice::Equilibrating, equilibrating_weight(s).matrix()},
        {InverseChoice::Manipulating, manipulating_weight(s, virt).matrix()},
    }};
    for (const auto& [choice, w] : methods) {
      const Matrix p = wrench_map_inverse(s, choice, &virt);
      const Vector tau = p * h;
      const Matrix n = nullspace_projector(s.wrench_map(), p);
      const double cost = tau.dot(w * tau);
      for (int k = 0; k < 5; ++k) {
        const Vector d = n * random_matrix(rng, 6, 1);
        const double dn = std::sqrt(d.dot(w * d));
        grad_worst = std::max(grad_worst, std::abs(tau.dot(w * d)) / std::max(std::sqrt(cost) * dn, kAbsFloor));
        const Vector moved = tau + d;
        cost_ok = cost_ok && moved.dot(w * moved) >= cost * (1.0 - 1e-12);
      }
    }
  }
  note(grad_worst < 1e-9 && cost_ok, fmt("null-space optimality %.1e", grad_worst));

  // G B = J^T at random poses.
  double gb_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ManipulatorState s = poses_a.next();
    const Matrix gb = build_grasp_matrix(s.grasp_system()) * s.basis();
    gb_worst = std::max(gb_worst, (gb - s.j().transpose()).norm() / s.j().norm());
  }
  note(gb_worst < 1e-12, fmt("G B = J^T %.1e", gb_worst));

  // Power balance: tau . q' = h_o . x' with K q' = J x'.
  double power_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const ManipulatorState s = poses_a.next();
    const Vector xd = random_matrix(rng, 3, 1);
    const Vector tau = random_matrix(rng, 6, 1);
    const Vector qd = s.k().partialPivLu().solve(s.j() * xd);
    const Vector h = forward_force(s, tau);
    power_worst = std::max(power_worst, std::abs(tau.dot(qd) - h.dot(xd)) / std::max(1.0, tau.norm() * qd.norm()));
  }
  note(power_worst < 1e-10, fmt("power balance %.1e", power_worst));

  // Central differences of the inverse kinematics against K^{-1} J.
  double fd_worst = 0.0;
  constexpr double dt = 1e-6;
  auto angles = [](const ManipulatorState& s) {
    Vector q(static_cast<Eigen::Index>(s.actuator_count()));
    for (std::size_t j = 0; j < s.leg_count(); ++j) {
      q(2 * static_cast<Eigen::Index>(j)) = s.legs()[j].theta1;
      q(2 * static_cast<Eigen::Index>(j) + 1) = s.legs()[j].theta2;
    }
    return q;
  };
  for (int t = 0; t < 100; ++t) {
    const ManipulatorState s = poses_a.next();
    const Vector xd = random_matrix(rng, 3, 1).normalized();
    const Pose p = s.pose();
    const Pose plus{p.x + dt * xd(0), p.y + dt * xd(1), p.phi + dt * xd(2)};
    const Pose minus{p.x - dt * xd(0), p.y - dt * xd(1), p.phi - dt * xd(2)};
    Vector diff = angles(inverse_kinematics(nominal.model, plus, nominal.elbows)) -
                  angles(inverse_kinematics(nominal.model, minus, nominal.elbows));
    for (Eigen::Index i = 0; i < diff.size(); ++i) diff(i) = std::remainder(diff(i), 2.0 * std::numbers::pi);
    const Vector fd = diff / (2.0 * dt);
    const Vector analytic = s.k().partialPivLu().solve(s.j() * xd);
    fd_worst = std::max(fd_worst, (fd - analytic).norm() / analytic.norm());
  }
  note(fd_worst < 1e-4, fmt("finite-difference Jacobian %.1e", fd_worst));

  return {10, "property suites", pass, detail};
}

}  // namespace

std::vector<CriterionResult> run_reproduction_suite(const SuiteOptions& options) {
  const std::array<std::function<CriterionResult(const SuiteOptions&)>, 10> checks = {
      ik_reproduction,       min_norm_torques,      equilibrating_torques_row, interaction_residuals_row,
      modified_end_effector, manipulating_physics,  symmetric_identity,        polygon_topology,
      zonotope_containment,  property_suites,
  };
  static const std::array<const char*, 10> names = {
      "inverse kinematics",     "min-norm torques",           "equilibrating torques", "interaction residuals",
      "modified end-effector",  "manipulating distribution physics", "symmetric-case identity",
      "polygon topology",       "zonotope containment",       "property suites",
  };
  std::vector<CriterionResult> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    try {
      out.push_back(checks[i](options));
    } catch (const std::exception& e) {
      out.push_back({static_cast<int>(i + 1), names[i], false, std::string("error: ") + e.what()});
    }
  }
  return out;
}

std::string format_table(const std::vector<CriterionResult>& results) {
  std::string s;
  for (const auto& r : results) {
    char head[96];
    std::snprintf(head, sizeof head, "%s  %2d  %-34s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    s += head;
    s += r.detail;
    s += '\n';
  }
  return s;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  return !results.empty() &&
         std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
}

}  // namespace pmw
