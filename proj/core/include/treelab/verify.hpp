#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace treelab {

// Self-contained verification suite: each check pins an identity, an oracle
// comparison, or a scaling law with its tolerance, and reports the measured
// values. The CLI `verify` subcommand and the acceptance test suite both run
// this registry.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t base_seed = 20250811;
  int workers = 0;                 // 0 = default_worker_count()
  bool inject_wrong_gamma = false; // regression trap: flips the tail target to alpha/beta
  std::vector<std::string> filter; // run only checks whose name contains one of these
};

std::vector<std::string> list_checks();

// Runs the (filtered) checks; one "[PASS]/[FAIL] name: detail" line per check
// goes to `progress` when given.
std::vector<CheckResult> run_checks(const VerifyOptions& opts, std::ostream* progress = nullptr);

}  // namespace treelab
