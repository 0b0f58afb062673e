// Acceptance checks. Usage: heatcloak_acceptance [criterion ...]
// Criteria: 1 2 3 4 5 6 7 (or 7a 7b 7c) 8-3d 8-2d 9 (default: all). Exit status is 1 when
// any selected check fails.

#include "heatcloak/validation.hpp"

#include <algorithm>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace hv = heatcloak::validation;

int main(int argc, char** argv) {
  using Check = std::vector<hv::CheckLine> (*)();
  const std::vector<std::pair<std::string, Check>> checks{
      {"1", hv::rate_3d},
      {"2", hv::rate_2d},
      {"3", hv::frequency_envelope},
      {"4", hv::exterior_decay},
      {"5", hv::change_of_variables},
      {"6", hv::pipeline_equivalence},
      {"7", hv::special_functions_check},
      {"8-3d", hv::object_independence_3d},
      {"8-2d", hv::object_independence_2d},
      {"9", hv::solver_bedrock},
  };
  const std::vector<std::string> wanted(argv + 1, argv + argc);
  // "7a" selects the 7a lines of check "7"; "7" selects all of them.
  auto selects = [&](const std::string& key) {
    if (wanted.empty()) return true;
    return std::any_of(wanted.begin(), wanted.end(), [&](const std::string& w) { return w.rfind(key, 0) == 0; });
  };
  auto shows = [&](const std::string& key, const std::string& line_id) {
    if (wanted.empty()) return true;
    return std::any_of(wanted.begin(), wanted.end(), [&](const std::string& w) { return w == key || w == line_id; });
  };
  bool ok = true;
  for (const auto& [key, fn] : checks) {
    if (!selects(key)) continue;
    try {
      for (const auto& line : fn()) {
        if (!shows(key, line.id)) continue;
        std::cout << hv::format_line(line) << std::endl;
        if (!line.informational) ok = ok && line.pass;
      }
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << key << " raised: " << e.what() << std::endl;
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
