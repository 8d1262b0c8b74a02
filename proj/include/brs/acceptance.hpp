#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "brs/discrepancy.hpp"

namespace brs {

struct AcceptanceOptions {
  // Multiplies orbit lengths, sample counts and instance counts; 1 is the full
  // suite, `brs selftest` uses 0.1.
  double scale = 1.0;
  unsigned long long seed = 0;
  int threads = 0;
  DiagnosticConfig config;
  std::vector<int> only;  // criterion ids to run; empty runs all
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

// Runs the acceptance criteria in order, printing one "PASS"/"FAIL" line per
// criterion to `out` when given.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream* out = nullptr);

}  // namespace brs
