#include "pmw/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace pmw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where + ": number is not finite");
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != N) fail(where + ": expected an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = number(j[static_cast<std::size_t>(i)], where);
  return v;
}

void expect_unit(const json& units, const char* key, const char* value) {
  const auto& u = field(units, key, "units");
  if (!u.is_string() || u.get<std::string>() != value)
    fail(std::string("units.") + key + ": expected \"" + value + "\"");
}

}  // namespace

Pose Scene::pose() const { return {pose_x, pose_y, pose_phi_deg * std::numbers::pi / 180.0}; }

Scene parse_scene(const json& j) {
  if (!j.is_object()) fail("scene: expected a JSON object");
  const auto& ver = field(j, "schema_version", "scene");
  if (!ver.is_number_integer() || ver.get<int>() != kSceneSchemaVersion)
    fail("schema_version: expected " + std::to_string(kSceneSchemaVersion));
  const auto& units = field(j, "units", "scene");
  expect_unit(units, "length", "m");
  expect_unit(units, "angle", "deg");
  expect_unit(units, "torque", "N*m");
  expect_unit(units, "force", "N");

  Scene s;
  const auto& legs = field(field(j, "geometry", "scene"), "legs", "geometry");
  if (!legs.is_array() || legs.size() < 2) fail("geometry.legs: expected at least two legs");
  for (std::size_t i = 0; i < legs.size(); ++i) {
    const std::string where = "geometry.legs[" + std::to_string(i) + "]";
    const auto& l = legs[i];
    LegGeometry g;
    g.base = vec<2>(field(l, "base", where), where + ".base");
    g.proximal = number(field(l, "proximal", where), where + ".proximal");
    g.distal = number(field(l, "distal", where), where + ".distal");
    g.attachment = vec<2>(field(l, "attachment", where), where + ".attachment");
    const auto& elbow = field(l, "elbow", where);
    if (!elbow.is_number_integer() || (elbow.get<int>() != 1 && elbow.get<int>() != -1))
      fail(where + ".elbow: expected +1 or -1");
    s.model.legs.push_back(g);
    s.elbows.push_back(elbow.get<int>());
  }
  if (const auto& geo = j.at("geometry"); geo.contains("ee_inertia")) {
    const auto& e = geo.at("ee_inertia");
    RigidBodyInertia in;
    in.mass = number(field(e, "mass", "geometry.ee_inertia"), "geometry.ee_inertia.mass");
    in.rotational = Matrix::Constant(1, 1, number(field(e, "inertia", "geometry.ee_inertia"),
                                                  "geometry.ee_inertia.inertia"));
    s.model.ee_inertia = in;
  }

  const auto& pose = field(j, "pose", "scene");
  s.pose_x = number(field(pose, "x", "pose"), "pose.x");
  s.pose_y = number(field(pose, "y", "pose"), "pose.y");
  s.pose_phi_deg = number(field(pose, "phi", "pose"), "pose.phi");

  const auto& act = field(j, "actuation", "scene");
  s.tau_max = number(field(act, "tau_max", "actuation"), "actuation.tau_max");
  if (!(s.tau_max > 0.0)) fail("actuation.tau_max: must be positive");
  const auto& per = field(act, "actuated_per_leg", "actuation");
  if (!per.is_array() || per.size() != legs.size())
    fail("actuation.actuated_per_leg: expected one count per leg");
  for (const auto& c : per) {
    if (!c.is_number_integer() || c.get<int>() < 0) fail("actuation.actuated_per_leg: expected non-negative integers");
    s.actuated_per_leg.push_back(c.get<int>());
  }

  if (j.contains("virtual_inertia")) {
    const auto& v = j.at("virtual_inertia");
    const auto& mode = field(v, "mode", "virtual_inertia");
    if (mode == "solve") {
      s.virtual_inertia.mode = VirtualInertiaSpec::Mode::Solve;
      if (v.contains("total_mass")) s.virtual_inertia.total_mass = number(v.at("total_mass"), "virtual_inertia.total_mass");
    } else if (mode == "explicit") {
      s.virtual_inertia.mode = VirtualInertiaSpec::Mode::Explicit;
      const auto& m = field(v, "masses", "virtual_inertia");
      if (!m.is_array() || m.size() != legs.size()) fail("virtual_inertia.masses: expected one mass per leg");
      for (const auto& x : m) s.virtual_inertia.masses.push_back(number(x, "virtual_inertia.masses"));
      s.virtual_inertia.total_mass = 0.0;
      for (double x : s.virtual_inertia.masses) s.virtual_inertia.total_mass += x;
    } else {
      fail("virtual_inertia.mode: expected \"solve\" or \"explicit\"");
    }
  }

  if (j.contains("task")) {
    const auto& t = j.at("task");
    if (t.contains("wrench")) s.task.wrench = vec<3>(t.at("wrench"), "task.wrench");
    if (t.contains("directions")) {
      const auto& d = t.at("directions");
      if (!d.is_number_integer() || d.get<long long>() < 3) fail("task.directions: expected an integer >= 3");
      s.task.directions = d.get<std::size_t>();
    }
    if (t.contains("mz")) s.task.mz = number(t.at("mz"), "task.mz");
  }
  return s;
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scene file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
  return parse_scene(j);
}

json scene_to_json(const Scene& s) {
  json legs = json::array();
  for (std::size_t i = 0; i < s.model.legs.size(); ++i) {
    const auto& g = s.model.legs[i];
    legs.push_back({{"base", {g.base.x(), g.base.y()}},
                    {"proximal", g.proximal},
                    {"distal", g.distal},
                    {"attachment", {g.attachment.x(), g.attachment.y()}},
                    {"elbow", s.elbows[i]}});
  }
  json geometry = {{"legs", legs}};
  if (s.model.ee_inertia)
    geometry["ee_inertia"] = {{"mass", s.model.ee_inertia->mass}, {"inertia", s.model.ee_inertia->rotational(0, 0)}};
  json virt;
  if (s.virtual_inertia.mode == VirtualInertiaSpec::Mode::Solve)
    virt = {{"mode", "solve"}, {"total_mass", s.virtual_inertia.total_mass}};
  else
    virt = {{"mode", "explicit"}, {"masses", s.virtual_inertia.masses}};
  return {
      {"schema_version", kSceneSchemaVersion},
      {"units", {{"length", "m"}, {"angle", "deg"}, {"torque", "N*m"}, {"force", "N"}}},
      {"geometry", geometry},
      {"pose", {{"x", s.pose_x}, {"y", s.pose_y}, {"phi", s.pose_phi_deg}}},
      {"actuation", {{"tau_max", s.tau_max}, {"actuated_per_leg", s.actuated_per_leg}}},
      {"virtual_inertia", virt},
      {"task",
       {{"wrench", {s.task.wrench.x(), s.task.wrench.y(), s.task.wrench.z()}},
        {"directions", s.task.directions},
        {"mz", s.task.mz}}},
  };
}

bool operator==(const Scene& a, const Scene& b) {
  if (a.model.legs.size() != b.model.legs.size()) return false;
  for (std::size_t i = 0; i < a.model.legs.size(); ++i) {
    const auto& x = a.model.legs[i];
    const auto& y = b.model.legs[i];
    if (x.base != y.base || x.proximal != y.proximal || x.distal != y.distal || x.attachment != y.attachment)
      return false;
  }
  if (a.model.ee_inertia.has_value() != b.model.ee_inertia.has_value()) return false;
  if (a.model.ee_inertia && (a.model.ee_inertia->mass != b.model.ee_inertia->mass ||
                             a.model.ee_inertia->rotational != b.model.ee_inertia->rotational))
    return false;
  return a.elbows == b.elbows && a.pose_x == b.pose_x && a.pose_y == b.pose_y && a.pose_phi_deg == b.pose_phi_deg &&
         a.tau_max == b.tau_max && a.actuated_per_leg == b.actuated_per_leg &&
         a.virtual_inertia.mode == b.virtual_inertia.mode &&
         a.virtual_inertia.total_mass == b.virtual_inertia.total_mass &&
         a.virtual_inertia.masses == b.virtual_inertia.masses && a.task.wrench == b.task.wrench &&
         a.task.directions == b.task.directions && a.task.mz == b.task.mz;
}

VirtualInertiaDistribution resolve_virtual_inertia(const Scene& scene, const ManipulatorState& state) {
  const GraspSystem sys = state.grasp_system();
  if (scene.virtual_inertia.mode == VirtualInertiaSpec::Mode::Solve)
    return solve_virtual_masses(sys, scene.virtual_inertia.total_mass);
  VirtualInertiaDistribution v;
  v.masses = scene.virtual_inertia.masses;
  v.inertias.assign(v.masses.size(), Matrix::Zero(1, 1));
  v.total_mass = scene.virtual_inertia.total_mass;
  for (double m : v.masses) v.non_positive_mass = v.non_positive_mass || m <= 0.0;
  // Planar point masses: the aggregate inertia is sum m_i |r_i|^2.
  v.total_inertia = Matrix::Zero(1, 1);
  for (std::size_t i = 0; i < v.masses.size(); ++i)
    v.total_inertia(0, 0) += v.masses[i] * sys.planar_position(i).squaredNorm();
  validate_virtual_distribution(sys, v);
  return v;
}

std::filesystem::path bundled_scene_dir() { return PMW_SCENE_DIR; }

}  // namespace pmw
