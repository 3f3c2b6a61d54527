#pragma once

#include <string>
#include <vector>

namespace intphase {

struct VerifyOptions {
    bool oracle = true;  // false: ODE-oracle sub-checks report "skipped"
};

struct CheckResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool skipped = false;  // whole criterion skipped (never set by default suite)
    std::string detail;
    double seconds = 0.0;
};

struct VerifySummary {
    std::vector<CheckResult> checks;
    double total_seconds = 0.0;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass && !c.skipped) return false;
        return true;
    }
};

// Runs the ten acceptance criteria. Honors the INTPHASE_QUAD_TOL environment
// override (fault injection) the same way the CLI evaluation path does.
VerifySummary run_acceptance(const VerifyOptions& opts = {});

// One line per criterion: PASS/FAIL/SKIP, id, title, detail, timing.
std::string format_acceptance_line(const CheckResult& check);

}  // namespace intphase
