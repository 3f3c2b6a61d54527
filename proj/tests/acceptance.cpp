#include <cstdio>

#include "intphase/verify.hpp"

int main() {
    const intphase::VerifySummary summary = intphase::run_acceptance();
    for (const intphase::CheckResult& check : summary.checks)
        std::printf("%s\n", intphase::format_acceptance_line(check).c_str());
    const bool ok = summary.all_pass();
    std::printf("%s [total %.2f s]\n",
                ok ? "acceptance: all criteria passed" : "acceptance: FAILURES present",
                summary.total_seconds);
    return ok ? 0 : 1;
}
