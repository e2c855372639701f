// One line per reproduction criterion; exit status 0 iff every criterion passes.
#include <iostream>

#include "pmw/reproduction.hpp"

int main() {
  const auto results = pmw::run_reproduction_suite(pmw::SuiteOptions{});
  std::cout << pmw::format_table(results);
  return pmw::all_pass(results) ? 0 : 1;
}
