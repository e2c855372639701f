#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "pmw/scene.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("pmw_cli_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" + PMWRENCH_PATH + "' " + args + " > '" + out.string() +
                            "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  static std::string scene(const char* name) { return "--scene '" + (pmw::bundled_scene_dir() / name).string() + "'"; }

  fs::path write_scene(const json& j, const char* name) const {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static json bundled(const char* name) {
    std::ifstream in(pmw::bundled_scene_dir() / name);
    return json::parse(in);
  }

  fs::path dir_;
};

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST_F(Cli, SynthEquilibratingReportsTheCaseStudyTorques) {
  const auto r = run("synth " + scene("nokleby_pose.json") + " --method equilibrating --wrench 1.662,70.689,0");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const std::vector<double> expected = {3.486, 3.954, -3.583, 0.246, 0.096, -4.200};
  ASSERT_EQ(j["result"]["tau"].size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(j["result"]["tau"][i].get<double>(), expected[i], 1e-3 + 1e-12);
}

TEST_F(Cli, SynthZeroWrench) {
  const auto r = run("synth " + scene("nokleby_pose.json") + " --wrench 0,0,0");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  for (const auto& t : j["result"]["tau"]) EXPECT_EQ(t.get<double>(), 0.0);
}

TEST_F(Cli, SynthWritesToOutPath) {
  const auto r = run("synth " + scene("modified_ee.json") + " --method manipulating --out report.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(dir_ / "report.json"))["method"], "manipulating");
}

TEST_F(Cli, UnderactuatedSceneExitsFour) {
  const auto r = run("synth " + scene("underactuated_4rrr.json") + " --method equilibrating");
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("leg 1 under-actuated"), std::string::npos) << r.err;
  EXPECT_EQ(count_lines(r.err), 1u);
  EXPECT_EQ(run("synth " + scene("underactuated_4rrr.json")).code, 0);
}

TEST_F(Cli, ParseErrorsExitTwo) {
  EXPECT_EQ(run("synth --scene missing.json").code, 2);
  EXPECT_EQ(run("synth " + scene("nokleby_pose.json") + " --method fastest").code, 2);
  EXPECT_EQ(run("synth " + scene("nokleby_pose.json") + " --wrench 1,2").code, 2);
  EXPECT_EQ(run("synth " + scene("nokleby_pose.json") + " --wrench 1,x,2").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
  json j = bundled("nokleby_pose.json");
  j["units"]["angle"] = "rad";
  const auto r = run("synth --scene '" + write_scene(j, "rad.json").string() + "'");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("units.angle"), std::string::npos) << r.err;
}

TEST_F(Cli, KinematicErrorsExitThree) {
  json j = bundled("nokleby_pose.json");
  j["pose"]["y"] = -0.5;
  const auto r = run("synth --scene '" + write_scene(j, "far.json").string() + "'");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("leg"), std::string::npos) << r.err;
  EXPECT_EQ(count_lines(r.err), 1u);
}

TEST_F(Cli, PolygonAllMethodsReportsTwelveCrossings) {
  const auto r = run("polygon " + scene("nokleby_pose.json") + " --methods all --dirs 720 --format csv,svg,json --out .");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["polygons"].size(), 4u);
  EXPECT_EQ(j["intersections"][0]["a"], "min-norm");
  EXPECT_EQ(j["intersections"][0]["b"], "equilibrating");
  EXPECT_EQ(j["intersections"][0]["count"], 12);
  for (const char* f : {"polygon_min-norm.csv", "polygon_equilibrating.csv", "polygon_manipulating.csv",
                        "polygon_slice.csv", "polygons.svg", "report.json"})
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  const std::string svg = slurp(dir_ / "polygons.svg");
  for (const char* layer : {"min-norm", "equilibrating", "manipulating", "slice"})
    EXPECT_NE(svg.find(std::string("id=\"") + layer + "\""), std::string::npos) << layer;
}

TEST_F(Cli, PolygonFourDirectionsGivesValidCsv) {
  const auto r = run("polygon " + scene("nokleby_pose.json") + " --methods min-norm --dirs 4");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir_ / "polygon_min-norm.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "fx,fy");
  std::vector<std::pair<double, double>> pts;
  while (std::getline(csv, line)) {
    const auto c = line.find(',');
    ASSERT_NE(c, std::string::npos);
    pts.emplace_back(std::stod(line.substr(0, c)), std::stod(line.substr(c + 1)));
  }
  ASSERT_EQ(pts.size(), 4u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_NEAR(pts[k].first, -pts[k + 2].first, 1e-9);
    EXPECT_NEAR(pts[k].second, -pts[k + 2].second, 1e-9);
  }
}

TEST_F(Cli, PolygonMomentOutsideRangeExitsThree) {
  const auto r = run("polygon " + scene("nokleby_pose.json") + " --mz 100");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("outside"), std::string::npos) << r.err;
  EXPECT_EQ(run("polygon " + scene("nokleby_pose.json") + " --mz 1 --methods min-norm").code, 2);
  const auto slice = run("polygon " + scene("nokleby_pose.json") + " --mz 1");
  ASSERT_EQ(slice.code, 0) << slice.err;
  EXPECT_EQ(json::parse(slice.out)["polygons"].size(), 1u);
}

TEST_F(Cli, AnalyzeReferenceTorques) {
  const auto tau_min = run("analyze " + scene("nokleby_pose.json") + " --tau 2.290,1.895,-4.200,1.747,1.909,-3.641");
  ASSERT_EQ(tau_min.code, 0) << tau_min.err;
  double worst = 0.0;
  const json j = json::parse(tau_min.out);
  for (const auto& p : j["result"]["interaction_residuals"])
    worst = std::max(worst, std::abs(p["residual"].get<double>()));
  EXPECT_GT(worst, 0.1);

  const auto zero = run("analyze " + scene("nokleby_pose.json") + " --tau 0,0,0,0,0,0");
  ASSERT_EQ(zero.code, 0) << zero.err;
  const json z = json::parse(zero.out);
  for (const auto& v : z["result"]["realized_wrench"]) EXPECT_EQ(v.get<double>(), 0.0);
  for (const auto& p : z["result"]["interaction_residuals"]) EXPECT_EQ(p["residual"].get<double>(), 0.0);
  EXPECT_EQ(run("analyze " + scene("nokleby_pose.json") + " --tau 1,2,3").code, 2);
}

TEST_F(Cli, VerifySuite) {
  const auto ok = run("verify --suite paper");
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_EQ(count_lines(ok.out), 10u);
  EXPECT_EQ(ok.out.find("FAIL"), std::string::npos) << ok.out;

  const auto mutated = run("verify --suite paper --substitute-unweighted");
  EXPECT_EQ(mutated.code, 1);
  std::istringstream rows(mutated.out);
  std::string line;
  bool tau_e_failed = false;
  while (std::getline(rows, line))
    if (line.rfind("FAIL", 0) == 0 && line.find("equilibrating torques") != std::string::npos) tau_e_failed = true;
  EXPECT_TRUE(tau_e_failed) << mutated.out;

  EXPECT_EQ(run("verify --suite nonsense").code, 2);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns) {
  const std::string synth = "synth " + scene("modified_ee.json") + " --method equilibrating";
  EXPECT_EQ(run(synth).out, run(synth).out);
  const std::string poly = "polygon " + scene("modified_ee.json") + " --methods all --dirs 360 --format csv,json";
  const auto a = run(poly);
  ASSERT_EQ(a.code, 0) << a.err;
  const std::string csv = slurp(dir_ / "polygon_manipulating.csv"), rep = slurp(dir_ / "report.json");
  const auto b = run(poly);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(csv, slurp(dir_ / "polygon_manipulating.csv"));
  EXPECT_EQ(rep, slurp(dir_ / "report.json"));
}

TEST_F(Cli, EchoedSceneReparses) {
  const auto r = run("synth " + scene("modified_ee.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const pmw::Scene echoed = pmw::parse_scene(json::parse(r.out)["scene"]);
  EXPECT_TRUE(echoed == pmw::load_scene(pmw::bundled_scene_dir() / "modified_ee.json"));
}

}  // namespace
