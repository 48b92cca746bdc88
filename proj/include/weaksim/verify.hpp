#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace weaksim {

// One acceptance criterion: a named check with a pinned tolerance.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct BatteryOptions {
    std::uint64_t seed = 7;
    // Case counts for the randomized batteries; 0 keeps the defaults.
    int unconditional_cases = 50;
    int oracle_cases = 200;
    int roundtrip_cases = 100;
};

// Runs the full acceptance battery (12 criteria) and reports each outcome.
// Criteria never throw for a plain numeric miss -- they report pass = false
// with the measured number so failures stay diagnosable.
std::vector<CriterionResult> run_acceptance_battery(const BatteryOptions& opt);

// The deterministic result rows behind `verify --report`: canonical scenario
// runs, the convergence sweep, and the estimator round-trip battery, as CSV.
// Byte-identical for identical (seed, case-count) options.
std::string battery_report_csv(const BatteryOptions& opt);

} // namespace weaksim
