#include <algorithm>
#include <iostream>

#include "plk/acceptance.hpp"

int main() {
  const auto results = plk::run_acceptance(std::cout);
  const auto failed = std::count_if(results.begin(), results.end(),
                                    [](const plk::CriterionResult& r) { return !r.pass; });
  std::cout << (results.size() - static_cast<std::size_t>(failed)) << '/' << results.size()
            << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
