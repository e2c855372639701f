#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"
#include "pmw/export.hpp"
#include "pmw/report.hpp"

namespace pmw {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json scene_json(const char* file) {
  std::ifstream in(bundled_scene_dir() / file);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pmw_scene_report_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void expect_parse_error(json j, const std::string& field) {
  try {
    (void)parse_scene(j);
    ADD_FAILURE() << "expected ParseError naming " << field;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
  }
}

Vector rounded(const json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

TEST(SceneFile, BundledScenesRoundTrip) {
  for (const char* f : {"nokleby_pose.json", "modified_ee.json", "underactuated_4rrr.json"}) {
    const Scene s = test::scene(f);
    const Scene back = parse_scene(scene_to_json(s));
    EXPECT_TRUE(s == back) << f;
    EXPECT_EQ(scene_to_json(back).dump(), scene_to_json(s).dump()) << f;
  }
}

TEST(SceneFile, AnglesConvertOnUse) {
  json j = scene_json("nokleby_pose.json");
  j["pose"]["phi"] = 30.0;
  const Scene s = parse_scene(j);
  EXPECT_EQ(s.pose_phi_deg, 30.0);
  EXPECT_NEAR(s.pose().phi, std::numbers::pi / 6.0, 1e-15);
}

TEST(SceneFile, ErrorsNameTheField) {
  const json base = scene_json("nokleby_pose.json");
  json j = base;
  j.erase("units");
  expect_parse_error(j, "units");
  j = base;
  j["units"]["length"] = "mm";
  expect_parse_error(j, "units.length");
  j = base;
  j["schema_version"] = 2;
  expect_parse_error(j, "schema_version");
  j = base;
  j["geometry"]["legs"][1]["elbow"] = 0;
  expect_parse_error(j, "elbow");
  j = base;
  j["geometry"]["legs"][0]["base"] = json::array({0.0});
  expect_parse_error(j, "base");
  j = base;
  j["pose"]["x"] = "left";
  expect_parse_error(j, "pose.x");
  j = base;
  j["actuation"]["actuated_per_leg"] = json::array({2, 2});
  expect_parse_error(j, "actuated_per_leg");
  j = base;
  j["actuation"]["tau_max"] = -1.0;
  expect_parse_error(j, "tau_max");
  j = base;
  j["virtual_inertia"]["mode"] = "guess";
  expect_parse_error(j, "virtual_inertia");
  j = base;
  j["task"]["wrench"] = json::array({1.0, 2.0});
  expect_parse_error(j, "task.wrench");
}

TEST(SceneFile, MissingFileIsAParseError) {
  EXPECT_THROW_CODE(load_scene("/nonexistent/scene.json"), ErrorCode::ParseError);
  const auto dir = temp_dir("garbage");
  std::ofstream(dir / "bad.json") << "{ not json";
  EXPECT_THROW_CODE(load_scene(dir / "bad.json"), ErrorCode::ParseError);
  fs::remove_all(dir);
}

TEST(SceneFile, ExplicitVirtualMasses) {
  json j = scene_json("modified_ee.json");
  j["virtual_inertia"] = {{"mode", "explicit"}, {"masses", {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}}};
  const Scene s = parse_scene(j);
  const auto v = resolve_virtual_inertia(s, test::solve(s));
  EXPECT_NEAR(v.total_mass, 1.0, 1e-15);
  j["virtual_inertia"]["masses"] = {0.5, 0.25, 0.25};
  const Scene bad = parse_scene(j);
  EXPECT_THROW_CODE(resolve_virtual_inertia(bad, test::solve(bad)), ErrorCode::InvalidVirtualDistribution);
  j["virtual_inertia"]["masses"] = {0.5, 0.5};
  expect_parse_error(j, "masses");
}

TEST(Rounding, SignificantDigits) {
  EXPECT_EQ(round_significant(3.4864712), 3.48647);
  EXPECT_EQ(round_significant(-0.000123456789), -0.000123457);
  EXPECT_EQ(round_significant(70689.44), 70689.4);
  EXPECT_EQ(round_significant(0.0), 0.0);
  EXPECT_EQ(round_significant(1.0e-300), 1.0e-300);
  EXPECT_EQ(round_significant(2.51, 1), 3.0);
}

TEST(Finiteness, RejectsNonFiniteNumbers) {
  EXPECT_NO_THROW(require_finite(json{{"a", {1.0, 2.0}}, {"b", "text"}}));
  EXPECT_THROW_CODE(require_finite(json{{"a", {1.0, std::nan("")}}}), ErrorCode::InvalidArgument);
  EXPECT_THROW_CODE(require_finite(json{{"a", {{"b", HUGE_VAL}}}}), ErrorCode::InvalidArgument);
}

TEST(Names, MethodParsing) {
  EXPECT_EQ(parse_method("min-norm"), SynthesisMethod::MinTorqueNorm);
  EXPECT_EQ(parse_method("general"), SynthesisMethod::General);
  EXPECT_FALSE(parse_method("fastest").has_value());
  EXPECT_EQ(parse_inverse("unweighted"), InverseChoice::Unweighted);
  EXPECT_EQ(parse_inverse("min-norm"), InverseChoice::Unweighted);
  EXPECT_EQ(parse_inverse("manipulating"), InverseChoice::Manipulating);
  EXPECT_FALSE(parse_inverse("general").has_value());
}

TEST(SynthReport, EquilibratingCaseStudy) {
  const Scene s = test::nominal_scene();
  SynthRequest req;
  req.method = SynthesisMethod::Equilibrating;
  const json r = synth_report(s, req);
  EXPECT_EQ(r["command"], "synth");
  EXPECT_EQ(r["method"], "equilibrating");
  EXPECT_LE(test::max_abs(rounded(r["result"]["tau"]) - test::kTauE), test::kReportedTol);
  EXPECT_EQ(r["numerics"]["wrench_map_rank"], 3);
  EXPECT_LE(r["result"]["diagnostics"]["normalized_interaction_residual"].get<double>(), 1e-9);
  EXPECT_TRUE(parse_scene(r["scene"]) == s);
  EXPECT_NO_THROW(require_finite(r));
}

TEST(SynthReport, ZeroWrenchGivesZeroTorque) {
  SynthRequest req;
  req.wrench = PlanarWrench::Zero();
  const json r = synth_report(test::nominal_scene(), req);
  EXPECT_EQ(rounded(r["result"]["tau"]), Vector::Zero(6));
}

TEST(SynthReport, DeterminacyGate) {
  const Scene s = test::scene("underactuated_4rrr.json");
  for (auto m : {SynthesisMethod::Equilibrating, SynthesisMethod::Manipulating}) {
    SynthRequest req;
    req.method = m;
    try {
      (void)synth_report(s, req);
      ADD_FAILURE() << "expected StaticallyIndeterminate";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::StaticallyIndeterminate);
      EXPECT_NE(std::string(e.what()).find("leg 1 under-actuated"), std::string::npos) << e.what();
    }
  }
  // Min-norm uses only the actuated joints: passive joints carry zero torque.
  const json r = synth_report(s, SynthRequest{});
  const Vector tau = rounded(r["result"]["tau"]);
  ASSERT_EQ(tau.size(), 8);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(tau(2 * j + 1), 0.0);
  const Vec3 realized = rounded(r["result"]["realized_wrench"]);
  EXPECT_LE((realized - s.task.wrench).norm(), 1e-4 * s.task.wrench.norm());
}

TEST(SynthReport, GeneralNullVector) {
  const Scene s = test::nominal_scene();
  SynthRequest req;
  req.method = SynthesisMethod::General;
  req.null_vector = test::vec({1, 0, 0, 0, 0, 0});
  const json r = synth_report(s, req);
  EXPECT_LE((Vec3(rounded(r["result"]["realized_wrench"])) - test::kTask).norm(), 1e-3);
  req.null_vector = test::vec({1, 0});
  EXPECT_THROW_CODE(synth_report(s, req), ErrorCode::DimensionMismatch);
}

TEST(SynthReport, ByteIdenticalAcrossRuns) {
  const Scene s = test::modified_scene();
  SynthRequest req;
  req.method = SynthesisMethod::Manipulating;
  EXPECT_EQ(synth_report(s, req).dump(2), synth_report(s, req).dump(2));
}

TEST(AnalyzeReport, ReferenceTorques) {
  const Scene s = test::nominal_scene();
  const auto max_residual = [](const json& r) {
    double m = 0.0;
    for (const auto& p : r["result"]["interaction_residuals"]) m = std::max(m, std::abs(p["residual"].get<double>()));
    return m;
  };
  EXPECT_GT(max_residual(analyze_report(s, test::kTauMin)), 0.1);
  // Reference torques carry 3 decimals; the rounded input leaves residuals of that order.
  EXPECT_LT(max_residual(analyze_report(s, test::kTauE)), 1e-2);
  const json zero = analyze_report(s, Vector::Zero(6));
  EXPECT_EQ(rounded(zero["result"]["realized_wrench"]), Vector::Zero(3));
  EXPECT_EQ(max_residual(zero), 0.0);
  EXPECT_EQ(zero["result"]["constraint_wrench_norm"].get<double>(), 0.0);
  EXPECT_THROW_CODE(analyze_report(s, Vector::Zero(4)), ErrorCode::DimensionMismatch);
}

TEST(PolygonReport, WritesArtifactsAndCountsCrossings) {
  const auto dir = temp_dir("polygon");
  PolygonRequest req;
  req.methods = {InverseChoice::Unweighted, InverseChoice::Equilibrating, InverseChoice::Manipulating};
  req.formats = {"csv", "svg", "off"};
  req.out_dir = dir;
  const json r = polygon_report(test::nominal_scene(), req);
  EXPECT_EQ(r["polygons"].size(), 4u);
  EXPECT_EQ(r["intersections"][0]["count"], 12);
  for (const auto& a : r["artifacts"]) EXPECT_TRUE(fs::exists(a.get<std::string>())) << a;
  EXPECT_TRUE(fs::exists(dir / "polygon_slice.csv"));
  EXPECT_TRUE(fs::exists(dir / "polygons.svg"));
  EXPECT_TRUE(fs::exists(dir / "zonotope.off"));
  EXPECT_NO_THROW(require_finite(r));

  const std::string first = slurp(dir / "polygon_equilibrating.csv");
  const std::string svg = slurp(dir / "polygons.svg");
  (void)polygon_report(test::nominal_scene(), req);
  EXPECT_EQ(first, slurp(dir / "polygon_equilibrating.csv"));
  EXPECT_EQ(svg, slurp(dir / "polygons.svg"));
  fs::remove_all(dir);
}

TEST(PolygonReport, NonzeroMoment) {
  const auto dir = temp_dir("moment");
  PolygonRequest req;
  req.out_dir = dir;
  req.mz = 1.0;
  EXPECT_THROW_CODE(polygon_report(test::nominal_scene(), req), ErrorCode::InvalidArgument);
  req.methods.clear();
  const json r = polygon_report(test::nominal_scene(), req);
  EXPECT_EQ(r["polygons"].size(), 1u);
  req.mz = 100.0;
  EXPECT_THROW_CODE(polygon_report(test::nominal_scene(), req), ErrorCode::EmptyIntersection);
  fs::remove_all(dir);
}

TEST(Export, CsvRereadsBitExactly) {
  const auto st = test::solve(test::nominal_scene());
  const auto poly = polygon_scaling_method(st, TorqueBox(4.2), 0.0, 64, InverseChoice::Equilibrating).polygon;
  std::stringstream ss;
  write_polygon_csv(ss, poly);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "fx,fy");
  for (const Vec2& v : poly.vertices) {
    ASSERT_TRUE(std::getline(ss, line));
    const auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(0, comma)), v.x());
    EXPECT_EQ(std::stod(line.substr(comma + 1)), v.y());
  }
  EXPECT_FALSE(std::getline(ss, line));
}

TEST(Export, SvgLayersAndOffMesh) {
  const auto st = test::solve(test::nominal_scene());
  const ForcePolygon a = polygon_scaling_method(st, TorqueBox(4.2), 0.0, 16, InverseChoice::Unweighted).polygon;
  std::stringstream svg;
  write_polygon_svg(svg, {{"min-norm", a}, {"slice", a}}, Vec2(1.0, 2.0));
  const std::string s = svg.str();
  EXPECT_NE(s.find("<svg"), std::string::npos);
  EXPECT_NE(s.find("id=\"min-norm\""), std::string::npos);
  EXPECT_NE(s.find("id=\"slice\""), std::string::npos);
  EXPECT_NE(s.find("f_x (N)"), std::string::npos);
  EXPECT_NE(s.find("f_y (N)"), std::string::npos);

  const auto z = feasible_zonotope(st, TorqueBox(4.2));
  std::stringstream off;
  write_zonotope_off(off, z);
  std::string head;
  std::size_t nv = 0, nf = 0, ne = 0;
  off >> head >> nv >> nf >> ne;
  EXPECT_EQ(head, "OFF");
  EXPECT_EQ(nv, z.vertices().size());
  EXPECT_EQ(nf, z.faces().size());
}

}  // namespace
}  // namespace pmw
