#pragma once

#include "weaksim/scenario.hpp"
#include "weaksim/theory.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace weaksim {

// Everything one simulation run produces: simulated and predicted moments,
// the residuals between them, and the success-probability bookkeeping.
struct ScenarioResult {
    std::string scenario_id;
    Backend backend = Backend::exact;
    double g = 0.0;
    WeakValue w;
    Moments before;
    Moments after;     // of the *normalized* post-selected pointer
    ShiftPrediction predicted;
    double r_q = 0.0;  // |simulated - predicted| position shift
    double r_p = 0.0;
    double succ_sim = 0.0;
    double succ_pred = 0.0; // |<f|i>|^2 (1 + 2 g Im(A_w) <p>_i)
    double dvarq_dt = 0.0;  // initial-state rate entering the prediction
    double mass = 1.0;
};

ScenarioResult run_scenario(const Scenario& scenario);
// Same pipeline, but with the initial pointer supplied directly (tabulated
// states, mixtures, anything scenario files can't describe).
ScenarioResult run_scenario(const Scenario& scenario,
                            const PointerState& pointer);

// Residual channel of a g-sweep with its fitted log-log slope.  A channel
// whose residuals sit below 1e-9 across the whole ladder is flagged at_floor
// (slope is meaningless noise there; eigenstate scenarios do this).
struct ConvergenceChannel {
    std::string name;
    std::vector<double> residuals;
    double slope = 0.0;
    bool at_floor = false;
};

struct ConvergenceReport {
    std::vector<double> g_values; // >= 4 entries, strictly ascending
    std::vector<ScenarioResult> results;
    ConvergenceChannel q_channel;
    ConvergenceChannel p_channel;
    ConvergenceChannel succ_channel;
};

// Runs the scenario at every g in the ladder with the exact backend and fits
// how fast each first-order residual dies.
ConvergenceReport sweep_g(const Scenario& scenario,
                          const std::vector<double>& g_ladder);

// Inverts the shift law:  b = delta_p / (2 g Var_p),
// a = delta_q / g - b * mass * dVarq_dt, all moments from the initial pointer.
WeakValue estimate_weak_value(double delta_q, double delta_p, double g,
                              const PointerState& pointer, double mass);
// Same inversion from bare numbers (what a result CSV row carries).
WeakValue estimate_weak_value(double delta_q, double delta_p, double g,
                              double var_p, double dvarq_dt, double mass);

// CSV with the fixed header below, one row per result, %.17g floats, rows in
// the order given.
extern const char* kReportHeader;
void emit_report(const std::vector<ScenarioResult>& results, std::ostream& out);
void emit_report(const std::vector<ScenarioResult>& results,
                 const std::string& path);
std::string report_csv(const std::vector<ScenarioResult>& results);

} // namespace weaksim
