#pragma once

#include <string>
#include <vector>

namespace sivcav::acceptance {

// One row of the reference-reproduction table: a published figure of merit
// and the value this library computes for it.
struct CriterionResult {
    int index = 0;
    std::string name;
    std::string reference;  // published value or band
    std::string computed;
    bool pass = false;
};

// Runs every reproduction check. Deterministic: all stochastic checks use
// fixed seeds, so the table is identical between invocations.
std::vector<CriterionResult> run_all();

bool all_passed(const std::vector<CriterionResult>& results);

// Fixed-width text table, one row per criterion plus a verdict line.
std::string format_table(const std::vector<CriterionResult>& results);

}  // namespace sivcav::acceptance
