#pragma once
// Case-study reproduction suite: ten pass/fail checks over the bundled
// scenes, shared by `pmwrench verify` and the acceptance test binary.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pmw/scene.hpp"

namespace pmw {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteOptions {
  std::filesystem::path scene_dir = bundled_scene_dir();
  std::uint64_t seed = 0x5eed2024;
  /// Mutation check: use the unweighted inverse wherever the equilibrating
  /// inverse is expected. A correct suite then fails.
  bool substitute_unweighted_for_equilibrating = false;
};

std::vector<CriterionResult> run_reproduction_suite(const SuiteOptions& options = {});

/// One line per criterion: "PASS  1  name  detail".
std::string format_table(const std::vector<CriterionResult>& results);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace pmw
