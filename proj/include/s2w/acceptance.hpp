#pragma once

#include <string>
#include <vector>

namespace s2w {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

/// Run the eight acceptance criteria in order, printing one PASS/FAIL line
/// per criterion as it completes. Training artifacts (checkpoints, metrics)
/// land under work_dir, which is recreated from scratch. Criteria run
/// independently: a failure does not stop the suite.
std::vector<CriterionResult> run_acceptance(const std::string& work_dir);

/// Prints the summary line and returns 0 iff every criterion passed.
int acceptance_main(const std::string& work_dir);

}  // namespace s2w
