#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace plk {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  bool parallel = true;
};

/// Runs the nine acceptance criteria; one line per criterion goes to `log`.
[[nodiscard]] std::vector<CriterionResult> run_acceptance(std::ostream& log,
                                                          const AcceptanceOptions& opts = {});

}  // namespace plk
