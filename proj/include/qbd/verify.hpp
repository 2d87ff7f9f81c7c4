#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace qbd {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

// Suites: algebra, qb, driving, stability, all. Throws InvalidArgument on an unknown name.
std::vector<CheckResult> run_verification(std::string_view suite);
// One "[PASS]"/"[FAIL]" line per check; returns true when everything passed.
bool print_report(const std::vector<CheckResult>& results, std::ostream& out);

}  // namespace qbd
