#include "pmw/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <Eigen/SVD>

#include "pmw/export.hpp"
#include "pmw/wrenchspace.hpp"

namespace pmw {

using nlohmann::json;

double round_significant(double v, int digits) {
  if (v == 0.0 || !std::isfinite(v)) return v;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  const double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // drop negative zero
}

void require_finite(const json& j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>()))
    throw Error(ErrorCode::InvalidArgument, "report contains a non-finite number");
  if (j.is_structured())
    for (const auto& x : j) require_finite(x);
}

std::optional<SynthesisMethod> parse_method(const std::string& name) {
  for (auto m : {SynthesisMethod::MinTorqueNorm, SynthesisMethod::Equilibrating, SynthesisMethod::Manipulating,
                 SynthesisMethod::General})
    if (name == to_string(m)) return m;
  return std::nullopt;
}

std::optional<InverseChoice> parse_inverse(const std::string& name) {
  if (name == "min-norm" || name == "unweighted") return InverseChoice::Unweighted;
  if (name == "equilibrating") return InverseChoice::Equilibrating;
  if (name == "manipulating") return InverseChoice::Manipulating;
  return std::nullopt;
}

namespace {

json rounded(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(round_significant(v(i)));
  return a;
}

json rounded(double v) { return round_significant(v); }

std::string method_label(InverseChoice c) {
  return c == InverseChoice::Unweighted ? "min-norm" : std::string(to_string(c));
}

bool fully_actuated(const Scene& scene) {
  for (int n : scene.actuated_per_leg)
    if (n != 2) return false;
  return true;
}

void require_determined(const Scene& scene) {
  const auto rep = static_determinacy_check(scene.model, scene.actuated_per_leg);
  if (!rep.determined) throw Error(ErrorCode::StaticallyIndeterminate, rep.diagnostic);
}

json forces_json(const WrenchSet& f) {
  json a = json::array();
  for (std::size_t i = 0; i < f.count(); ++i) a.push_back(rounded(Vector(f.point(i))));
  return a;
}

json residuals_json(const WrenchSet& f, const GraspSystem& sys) {
  json a = json::array();
  for (const auto& p : interaction_residuals(f, sys))
    a.push_back({{"pair", {p.i + 1, p.j + 1}}, {"residual", rounded(p.residual)}});
  return a;
}

json numerics_json(const ManipulatorState& state, const std::optional<WeightingMatrix>& w) {
  json n = {{"wrench_map_rank", numerical_rank(state.wrench_map(), 1e-9 * state.wrench_map().norm())},
            {"wrench_map_condition", rounded(condition_number(state.wrench_map()))}};
  if (w) n["weighting_condition"] = rounded(condition_number(w->matrix()));
  return n;
}

json diagnostics_json(const SynthesisDiagnostics& d) {
  json j = {{"wrench_residual", rounded(d.wrench_residual)},
            {"max_interaction_residual", rounded(d.max_interaction_residual)},
            {"normalized_interaction_residual", rounded(d.normalized_interaction_residual)}};
  if (d.constraint_wrench_norm) j["constraint_wrench_norm"] = rounded(*d.constraint_wrench_norm);
  return j;
}

json virtual_json(const VirtualInertiaDistribution& v) {
  json m = json::array();
  for (double x : v.masses) m.push_back(rounded(x));
  return {{"masses", m}, {"total_mass", rounded(v.total_mass)}, {"non_positive_mass", v.non_positive_mass}};
}

// Min-norm over the actuated joints only: joint 1 then joint 2 of each leg
// up to its actuated count.
Vector partial_min_norm(const Scene& scene, const ManipulatorState& state, const PlanarWrench& h_o) {
  std::vector<Eigen::Index> cols;
  for (std::size_t j = 0; j < scene.actuated_per_leg.size(); ++j)
    for (int a = 0; a < std::min(scene.actuated_per_leg[j], 2); ++a)
      cols.push_back(2 * static_cast<Eigen::Index>(j) + a);
  Matrix sel = Matrix::Zero(static_cast<Eigen::Index>(state.actuator_count()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sel(cols[c], static_cast<Eigen::Index>(c)) = 1.0;
  const Matrix a = state.wrench_map() * sel;
  if (a.cols() < a.rows())
    throw Error(ErrorCode::RankDeficient, std::to_string(a.cols()) + " actuated joints cannot span a planar wrench");
  return sel * (mp_pinv(a) * h_o);
}

struct Prepared {
  ManipulatorState state;
  std::optional<VirtualInertiaDistribution> virt;
  std::vector<std::string> warnings;
};

Prepared prepare(const Scene& scene) {
  Prepared p{inverse_kinematics(scene.model, scene.pose(), scene.elbows), std::nullopt, {}};
  try {
    p.virt = resolve_virtual_inertia(scene, p.state);
    if (p.virt->non_positive_mass) p.warnings.push_back("virtual masses include non-positive entries");
  } catch (const Error& e) {
    p.warnings.push_back(std::string("virtual inertia unavailable: ") + e.what());
  }
  return p;
}

}  // namespace

json synth_report(const Scene& scene, const SynthRequest& request) {
  if (request.method == SynthesisMethod::Equilibrating || request.method == SynthesisMethod::Manipulating ||
      (request.method == SynthesisMethod::General && request.general_inverse != InverseChoice::Unweighted))
    require_determined(scene);

  auto prep = prepare(scene);
  const auto& state = prep.state;
  const VirtualInertiaDistribution* virt = prep.virt ? &*prep.virt : nullptr;
  const PlanarWrench h_o = request.wrench.value_or(scene.task.wrench);

  SynthesisResult r;
  std::optional<WeightingMatrix> w;
  switch (request.method) {
    case SynthesisMethod::MinTorqueNorm:
      if (fully_actuated(scene)) {
        r = min_torque_norm(state, h_o, virt);
      } else {
        r = evaluate_torques(state, partial_min_norm(scene, state, h_o), SynthesisMethod::MinTorqueNorm, virt);
        r.diagnostics.wrench_residual = (r.realized - h_o).norm() / std::max(h_o.norm(), kAbsFloor);
      }
      break;
    case SynthesisMethod::Equilibrating:
      w = equilibrating_weight(state);
      r = equilibrating_torques(state, h_o, virt);
      break;
    case SynthesisMethod::Manipulating:
      if (!virt) throw Error(ErrorCode::InvalidVirtualDistribution, "scene has no usable virtual inertia");
      w = manipulating_weight(state, *virt);
      r = manipulating_torques(state, *virt, h_o);
      break;
    case SynthesisMethod::General: {
      if (!fully_actuated(scene)) require_determined(scene);
      const Vector z = request.null_vector.value_or(Vector::Zero(static_cast<Eigen::Index>(state.actuator_count())));
      if (request.general_inverse == InverseChoice::Equilibrating) w = equilibrating_weight(state);
      if (request.general_inverse == InverseChoice::Manipulating && virt) w = manipulating_weight(state, *virt);
      r = general_resolution(state, h_o, request.general_inverse, z, virt);
      break;
    }
  }

  json rep = {
      {"command", "synth"},
      {"scene", scene_to_json(scene)},
      {"method", to_string(request.method)},
      {"wrench", rounded(Vector(h_o))},
      {"result",
       {{"tau", rounded(r.tau)},
        {"realized_wrench", rounded(Vector(r.realized))},
        {"applied_forces", forces_json(r.forces)},
        {"interaction_residuals", residuals_json(r.forces, state.grasp_system())},
        {"diagnostics", diagnostics_json(r.diagnostics)}}},
      {"numerics", numerics_json(state, w)},
      {"warnings", prep.warnings},
      {"artifacts", json::array()},
  };
  if (request.method == SynthesisMethod::General) rep["inverse"] = method_label(request.general_inverse);
  if (virt) rep["virtual_inertia"] = virtual_json(*virt);
  require_finite(rep);
  return rep;
}

json analyze_report(const Scene& scene, const Vector& tau) {
  auto prep = prepare(scene);
  const auto& state = prep.state;
  if (tau.size() != static_cast<Eigen::Index>(state.actuator_count()))
    throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(state.actuator_count()) + " torques, got " +
                                                  std::to_string(tau.size()));
  if (!tau.allFinite()) throw Error(ErrorCode::InvalidArgument, "torques are not finite");
  const VirtualInertiaDistribution* virt = prep.virt ? &*prep.virt : nullptr;
  const SynthesisResult r = evaluate_torques(state, tau, SynthesisMethod::General, virt);
  const GraspSystem sys = state.grasp_system();

  json rep = {
      {"command", "analyze"},
      {"scene", scene_to_json(scene)},
      {"tau", rounded(tau)},
      {"result",
       {{"realized_wrench", rounded(Vector(r.realized))},
        {"applied_forces", forces_json(r.forces)},
        {"interaction_residuals", residuals_json(r.forces, sys)},
        {"max_interaction_residual", rounded(r.diagnostics.max_interaction_residual)},
        {"normalized_interaction_residual", rounded(r.diagnostics.normalized_interaction_residual)}}},
      {"numerics", numerics_json(state, std::nullopt)},
      {"warnings", prep.warnings},
      {"artifacts", json::array()},
  };
  if (virt) {
    // h = h_m - h_c: the manipulating part plus the internal-load remainder.
    const WrenchSet hc = check_manipulating(sys, *virt, r.forces, Vector(r.realized));
    rep["result"]["constraint_wrenches"] = forces_json(hc);
    rep["result"]["constraint_wrench_norm"] = rounded(hc.norm());
    rep["virtual_inertia"] = virtual_json(*virt);
  }
  require_finite(rep);
  return rep;
}

json polygon_report(const Scene& scene, const PolygonRequest& request) {
  for (const auto& f : request.formats)
    if (f != "csv" && f != "svg" && f != "off" && f != "json")
      throw Error(ErrorCode::InvalidArgument, "unknown output format '" + f + "'");
  if (!request.methods.empty() && request.mz != 0.0)
    throw Error(ErrorCode::InvalidArgument, "scaling polygons are defined for zero moment only");

  auto prep = prepare(scene);
  const auto& state = prep.state;
  const TorqueBox box(scene.tau_max);
  const WrenchZonotope zon = feasible_zonotope(state, box);
  const ForcePolygon slice = slice_zonotope(zon, request.mz);

  bool needs_determinacy = false;
  for (auto m : request.methods) needs_determinacy = needs_determinacy || m != InverseChoice::Unweighted;
  if (needs_determinacy || !fully_actuated(scene)) require_determined(scene);

  const VirtualInertiaDistribution* virt = prep.virt ? &*prep.virt : nullptr;
  std::vector<SvgLayer> layers;
  json polygons = json::array();
  std::vector<std::pair<std::string, ForcePolygon>> scaling;
  const Vec2 task = scene.task.wrench.head<2>();

  auto describe = [&](const std::string& name, const ForcePolygon& p) {
    json d = {{"name", name},
              {"vertex_count", p.vertices.size()},
              {"area", rounded(p.area())},
              {"mz", rounded(p.mz)}};
    if (task.norm() > 0.0 && p.vertices.size() >= 3 && polygon_signed_distance(p, Vec2::Zero()) > 0.0)
      d["radius_along_task"] = rounded(polygon_radius(p, task));
    return d;
  };

  for (auto m : request.methods) {
    const auto sp = polygon_scaling_method(state, box, request.mz, request.n_dirs, m, virt);
    for (const auto& w : sp.warnings) prep.warnings.push_back(w);
    const std::string name = method_label(m);
    polygons.push_back(describe(name, sp.polygon));
    scaling.emplace_back(name, sp.polygon);
    layers.push_back({name, sp.polygon});
  }
  polygons.push_back(describe("slice", slice));
  layers.push_back({"slice", slice});

  json inter = json::array();
  for (std::size_t a = 0; a < scaling.size(); ++a)
    for (std::size_t b = a + 1; b < scaling.size(); ++b) {
      const auto x = polygon_intersections(scaling[a].second, scaling[b].second);
      json pts = json::array();
      for (const auto& p : x.points) pts.push_back(rounded(Vector(p)));
      inter.push_back({{"a", scaling[a].first},
                       {"b", scaling[b].first},
                       {"count", x.points.size()},
                       {"shared_boundary", x.shared_boundary},
                       {"points", pts}});
    }

  json artifacts = json::array();
  auto has = [&](const char* f) {
    return std::find(request.formats.begin(), request.formats.end(), f) != request.formats.end();
  };
  auto open = [&](const std::string& file) {
    std::filesystem::create_directories(request.out_dir);
    const auto path = request.out_dir / file;
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    artifacts.push_back(path.string());
    return out;
  };
  if (has("csv"))
    for (const auto& l : layers) {
      auto out = open("polygon_" + l.name + ".csv");
      write_polygon_csv(out, l.polygon);
    }
  if (has("svg")) {
    auto out = open("polygons.svg");
    write_polygon_svg(out, layers, request.mz == scene.task.wrench.z() ? std::optional<Vec2>(task) : std::nullopt);
  }
  if (has("off")) {
    auto out = open("zonotope.off");
    write_zonotope_off(out, zon);
  }

  json rep = {
      {"command", "polygon"},
      {"scene", scene_to_json(scene)},
      {"tau_max", rounded(scene.tau_max)},
      {"directions", request.n_dirs},
      {"polygons", polygons},
      {"intersections", inter},
      {"zonotope", {{"vertex_count", zon.vertices().size()}, {"face_count", zon.faces().size()},
                    {"moment_extent", rounded(zon.moment_extent())}}},
      {"warnings", prep.warnings},
      {"artifacts", artifacts},
  };
  require_finite(rep);
  return rep;
}

}  // namespace pmw
