// pmwrench: torque synthesis, wrench-polygon and reproduction commands.
//
// Exit codes: 0 success, 1 verify failure, 2 usage or scene parse error,
// 3 kinematic or numerical error, 4 statically indeterminate leg.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmw/report.hpp"
#include "pmw/reproduction.hpp"
#include "pmw/scene.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0') throw UsageError(std::string("malformed ") + what);
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit(const nlohmann::json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw UsageError("cannot write " + out_path);
  out << text;
}

int exit_code_for(pmw::ErrorCode code) {
  switch (code) {
    case pmw::ErrorCode::ParseError:
    case pmw::ErrorCode::InvalidArgument:
    case pmw::ErrorCode::DimensionMismatch: return 2;
    case pmw::ErrorCode::StaticallyIndeterminate: return 4;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint-torque synthesis and feasible-wrench analysis for redundantly actuated planar manipulators"};
  app.require_subcommand(1);

  std::string scene_path, method = "min-norm", wrench, inverse = "unweighted", null_vec, out, format = "json";
  auto* synth = app.add_subcommand("synth", "Synthesize joint torques for a task wrench");
  synth->add_option("--scene", scene_path, "Scene file (JSON)")->required();
  synth->add_option("--method", method, "min-norm | equilibrating | manipulating | general");
  synth->add_option("--wrench", wrench, "Task wrench fx,fy,mz (overrides the scene)");
  synth->add_option("--inverse", inverse, "Inverse used by --method general: unweighted | equilibrating | manipulating");
  synth->add_option("--null", null_vec, "Null-space vector z for --method general (one value per actuator)");
  synth->add_option("--out", out, "Write the report here instead of stdout");
  synth->add_option("--format", format, "Report format (json)");

  std::string methods, mz_text, poly_format = "csv";
  std::size_t dirs = 0;
  auto* polygon = app.add_subcommand("polygon", "Feasible force polygons and the zonotope slice");
  polygon->add_option("--scene", scene_path, "Scene file (JSON)")->required();
  polygon->add_option("--methods", methods, "Scaling methods: comma list of min-norm, equilibrating, manipulating, or all");
  polygon->add_option("--mz", mz_text, "Prescribed moment (N*m); defaults to the scene task");
  polygon->add_option("--dirs", dirs, "Sweep directions; defaults to the scene task");
  polygon->add_option("--format", poly_format, "Artifacts: comma list of csv, svg, off, json");
  polygon->add_option("--out", out, "Artifact directory (default: current directory)");

  std::string tau_text;
  auto* analyze = app.add_subcommand("analyze", "Forces, interaction residuals and internal loads for given torques");
  analyze->add_option("--scene", scene_path, "Scene file (JSON)")->required();
  analyze->add_option("--tau", tau_text, "Joint torques, comma separated")->required();
  analyze->add_option("--out", out, "Write the report here instead of stdout");

  std::string suite = "paper", scenes_dir;
  bool mutate = false;
  auto* verify = app.add_subcommand("verify", "Run the case-study reproduction suite");
  verify->add_option("--suite", suite, "Suite name (paper)");
  verify->add_option("--scenes", scenes_dir, "Directory holding the bundled scenes");
  verify->add_flag("--substitute-unweighted", mutate,
                   "Self-check: use the unweighted inverse in place of the equilibrating one (the suite must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "pmwrench: " << e.what() << "\n";
    return 2;
  }

  try {
    if (verify->parsed()) {
      if (suite != "paper") throw UsageError("unknown suite '" + suite + "'");
      pmw::SuiteOptions opt;
      if (!scenes_dir.empty()) opt.scene_dir = scenes_dir;
      opt.substitute_unweighted_for_equilibrating = mutate;
      const auto results = pmw::run_reproduction_suite(opt);
      std::cout << pmw::format_table(results);
      return pmw::all_pass(results) ? 0 : 1;
    }

    const pmw::Scene scene = pmw::load_scene(scene_path);

    if (synth->parsed()) {
      if (format != "json") throw UsageError("synth reports are JSON only");
      pmw::SynthRequest req;
      const auto m = pmw::parse_method(method);
      if (!m) throw UsageError("unknown method '" + method + "'");
      req.method = *m;
      if (!wrench.empty()) {
        const auto w = parse_numbers(wrench, "--wrench");
        if (w.size() != 3) throw UsageError("--wrench needs three values fx,fy,mz");
        req.wrench = pmw::PlanarWrench(w[0], w[1], w[2]);
      }
      const auto inv = pmw::parse_inverse(inverse);
      if (!inv) throw UsageError("unknown inverse '" + inverse + "'");
      req.general_inverse = *inv;
      if (!null_vec.empty()) {
        const auto z = parse_numbers(null_vec, "--null");
        req.null_vector = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
      }
      emit(pmw::synth_report(scene, req), out);
      return 0;
    }

    if (polygon->parsed()) {
      pmw::PolygonRequest req;
      req.mz = mz_text.empty() ? scene.task.mz : parse_numbers(mz_text, "--mz").at(0);
      req.n_dirs = dirs == 0 ? scene.task.directions : dirs;
      if (req.n_dirs < 3) throw UsageError("--dirs must be at least 3");
      if (methods.empty()) {
        // Scaling polygons exist only at zero moment; otherwise slice only.
        if (req.mz != 0.0) req.methods.clear();
      } else {
        req.methods.clear();
        for (const auto& name : split(methods)) {
          if (name == "all") {
            req.methods = {pmw::InverseChoice::Unweighted, pmw::InverseChoice::Equilibrating,
                           pmw::InverseChoice::Manipulating};
            continue;
          }
          const auto c = pmw::parse_inverse(name);
          if (!c) throw UsageError("unknown method '" + name + "'");
          req.methods.push_back(*c);
        }
        if (req.mz != 0.0) throw UsageError("scaling polygons require --mz 0");
      }
      req.formats = split(poly_format);
      if (!out.empty()) req.out_dir = out;
      const auto report = pmw::polygon_report(scene, req);
      if (std::find(req.formats.begin(), req.formats.end(), "json") != req.formats.end()) {
        std::filesystem::create_directories(req.out_dir);
        emit(report, (req.out_dir / "report.json").string());
      }
      emit(report, "");
      return 0;
    }

    if (analyze->parsed()) {
      const auto t = parse_numbers(tau_text, "--tau");
      const Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
      emit(pmw::analyze_report(scene, tau), out);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "pmwrench: " << e.what() << "\n";
    return 2;
  } catch (const pmw::Error& e) {
    std::cerr << "pmwrench: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "pmwrench: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
