#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ndevoi::verify {

// One manifest entry, evaluated. `detail` holds the got/expected comparison.
struct CheckOutcome {
  std::string id;
  int criterion = 0;  // grouping key used by the acceptance runner
  bool pass = false;
  std::string detail;
};

struct Report {
  std::vector<CheckOutcome> checks;
  int passed = 0;
  int failed = 0;
  bool all_pass() const { return failed == 0; }
};

// Evaluates every check in the manifest whose id starts with id_prefix
// (empty runs all). Expensive intermediate results (solved scenarios,
// cost-to-go tables) are computed once and shared. Value checks pass iff
// |got - expected| <= max(tol_abs, tol_rel * |expected|); extra_rel_tol adds
// a further relative-tolerance floor for exploratory runs.
Report run_manifest(const std::filesystem::path& manifest_path,
                    const std::string& id_prefix = {}, double extra_rel_tol = 0.0);

// One line per check plus a summary line.
std::string to_text(const Report& report);

}  // namespace ndevoi::verify
