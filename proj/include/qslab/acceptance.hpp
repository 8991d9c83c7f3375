#pragma once

// The acceptance suite: eleven criteria with pinned tolerances, each
// reported as a single pass/fail line plus detailed report rows.  Criterion
// 11 reruns the whole suite and compares the volatile-stripped reports
// byte-for-byte.

#include "qslab/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qslab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail; // measured-vs-bound summary for the printed line
    double seconds = 0;
};

struct AcceptanceOutcome {
    std::vector<CriterionResult> criteria;
    ExperimentReport report;

    bool all_pass() const;
    // `criterion N [PASS|FAIL] name: detail (Xs)` per line, then a summary.
    std::string format_lines() const;
};

AcceptanceOutcome run_acceptance(std::uint64_t seed);

} // namespace qslab
