#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

#include "brs/acceptance.hpp"

// Usage: acceptance [criterion ids...]
int main(int argc, char** argv) {
  brs::AcceptanceOptions opt;
  opt.config = brs::DiagnosticConfig::load(BRS_CONFIG_PATH);
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  auto results = brs::run_acceptance(opt, &std::cout);
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  std::cout << passed << "/" << results.size() << " criteria passed" << std::endl;
  return passed == static_cast<long>(results.size()) ? 0 : 1;
}
