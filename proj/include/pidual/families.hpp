#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pidual/config.hpp"
#include "pidual/duality.hpp"
#include "pidual/report.hpp"

namespace pidual {

struct FamilyInfo {
  std::string name;
  std::string description;
  std::vector<std::string> keys;  // family-specific config keys (prefixes end in '.')
};

// The nine experiment families, in a fixed order.
const std::vector<FamilyInfo>& family_registry();

struct RunResult {
  DualityReport report;
  std::vector<std::string> config_echo;
};

// Executes the family described by `config`; instances run in parallel over
// `threads` workers with schedule-independent output.
RunResult run_family(const Config& config, int threads = 1);

// Rebuilds the instances from the report's config echo and re-verifies every
// serialized witness: decompositions must reconstruct their targets to 1e-9
// and dual functionals must be feasible to 1e-9.
struct RecheckResult {
  int checked = 0;
  int failures = 0;
  std::vector<std::string> messages;
};
RecheckResult recheck_report(const ParsedReport& parsed);

int thread_count_from_env();

}  // namespace pidual
