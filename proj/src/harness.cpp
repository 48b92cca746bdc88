#include "weaksim/harness.hpp"

#include "weaksim/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace weaksim {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PostSelectedPointer dispatch(const Scenario& scenario,
                             const PointerState& pointer) {
    switch (scenario.backend) {
        case Backend::exact:
            return couple_postselect_exact(scenario.coupling, pointer);
        case Backend::first_order:
            return couple_postselect_first_order(scenario.coupling, pointer,
                                                 scenario.overlap_threshold);
        case Backend::weak_exp:
            return couple_postselect_weak_exp(scenario.coupling, pointer,
                                              scenario.overlap_threshold);
    }
    throw BadScenario("run_scenario: unknown backend");
}

// Least-squares slope of ln(residual) against ln(g).
double log_log_slope(const std::vector<double>& g,
                     const std::vector<double>& r) {
    const std::size_t n = g.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(g[i]);
        const double y = std::log(std::max(r[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

ConvergenceChannel fit_channel(const std::string& name,
                               const std::vector<double>& g,
                               std::vector<double> residuals) {
    ConvergenceChannel ch;
    ch.name = name;
    ch.residuals = std::move(residuals);
    double worst = 0.0;
    for (double r : ch.residuals) worst = std::max(worst, r);
    ch.at_floor = worst <= 1e-9;
    ch.slope = ch.at_floor ? 0.0 : log_log_slope(g, ch.residuals);
    return ch;
}

} // namespace

const char* kReportHeader =
    "scenario_id,backend,g,a,b,mean_q_i,mean_q_f_sim,mean_q_f_pred,r_q,"
    "mean_p_i,mean_p_f_sim,mean_p_f_pred,r_p,var_p,dvarq_dt,succ_sim,"
    "succ_pred";

ScenarioResult run_scenario(const Scenario& scenario) {
    return run_scenario(scenario, scenario_pointer(scenario));
}

ScenarioResult run_scenario(const Scenario& scenario,
                            const PointerState& pointer) {
    if (!(pointer.grid == scenario.grid))
        throw BadScenario("run_scenario: pointer grid does not match scenario grid");

    ScenarioResult res;
    res.scenario_id = scenario.id;
    res.backend = scenario.backend;
    res.g = scenario.coupling.g;
    res.mass = scenario.coupling.mass;
    res.w = weak_value(scenario.coupling.observable, scenario.coupling.psi_i,
                       scenario.coupling.psi_f, scenario.overlap_threshold);
    res.before = moments(pointer);
    res.dvarq_dt = d_var_q_dt(pointer, scenario.coupling.mass);
    res.predicted =
        predict_shifts(res.w, scenario.coupling.g, pointer,
                       scenario.coupling.mass);

    const PostSelectedPointer alpha = dispatch(scenario, pointer);
    res.succ_sim = alpha.success_prob;
    const cplx overlap =
        inner_product(scenario.coupling.psi_f, scenario.coupling.psi_i);
    res.succ_pred = std::norm(overlap) *
                    (1.0 + 2.0 * scenario.coupling.g * res.w.b *
                               res.before.mean_p);

    res.after = moments(conditioned_pointer(alpha));
    res.r_q = std::abs((res.after.mean_q - res.before.mean_q) -
                       res.predicted.delta_q);
    res.r_p = std::abs((res.after.mean_p - res.before.mean_p) -
                       res.predicted.delta_p);
    return res;
}

ConvergenceReport sweep_g(const Scenario& scenario,
                          const std::vector<double>& g_ladder) {
    if (g_ladder.size() < 4)
        throw BadScenario("sweep: need at least 4 g values, got " +
                          std::to_string(g_ladder.size()));
    for (std::size_t i = 0; i < g_ladder.size(); ++i) {
        if (!(g_ladder[i] > 0.0))
            throw BadScenario("sweep: g values must be positive");
        if (i > 0 && !(g_ladder[i] > g_ladder[i - 1]))
            throw BadScenario("sweep: g ladder must be strictly ascending");
    }

    ConvergenceReport report;
    report.g_values = g_ladder;
    std::vector<double> rq, rp, rs;
    for (double g : g_ladder) {
        Scenario step = scenario;
        step.coupling.g = g;
        step.backend = Backend::exact; // residual law is about the exact run
        const ScenarioResult res = run_scenario(step);
        rq.push_back(res.r_q);
        rp.push_back(res.r_p);
        rs.push_back(std::abs(res.succ_sim - res.succ_pred));
        report.results.push_back(res);
    }
    report.q_channel = fit_channel("delta_q", g_ladder, std::move(rq));
    report.p_channel = fit_channel("delta_p", g_ladder, std::move(rp));
    report.succ_channel = fit_channel("success", g_ladder, std::move(rs));
    return report;
}

WeakValue estimate_weak_value(double delta_q, double delta_p, double g,
                              const PointerState& pointer, double mass) {
    const Moments m = moments(pointer);
    return estimate_weak_value(delta_q, delta_p, g, m.var_p,
                               d_var_q_dt(pointer, mass), mass);
}

WeakValue estimate_weak_value(double delta_q, double delta_p, double g,
                              double var_p, double dvarq_dt, double mass) {
    if (g == 0.0)
        throw BadScenario("estimate_weak_value: g must be nonzero");
    if (var_p < 1e-12)
        throw DegeneratePointer("estimate_weak_value: Var_p = " +
                                std::to_string(var_p) +
                                " cannot resolve Im(A_w)");
    WeakValue w;
    w.b = delta_p / (2.0 * g * var_p);
    w.a = delta_q / g - w.b * mass * dvarq_dt;
    return w;
}

std::string report_csv(const std::vector<ScenarioResult>& results) {
    std::ostringstream out;
    out << kReportHeader << '\n';
    for (const auto& r : results) {
        out << r.scenario_id << ',' << backend_name(r.backend) << ','
            << g17(r.g) << ',' << g17(r.w.a) << ',' << g17(r.w.b) << ','
            << g17(r.before.mean_q) << ',' << g17(r.after.mean_q) << ','
            << g17(r.predicted.mean_q_f) << ',' << g17(r.r_q) << ','
            << g17(r.before.mean_p) << ',' << g17(r.after.mean_p) << ','
            << g17(r.predicted.mean_p_f) << ',' << g17(r.r_p) << ','
            << g17(r.before.var_p) << ',' << g17(r.dvarq_dt) << ','
            << g17(r.succ_sim) << ',' << g17(r.succ_pred) << '\n';
    }
    return out.str();
}

void emit_report(const std::vector<ScenarioResult>& results,
                 std::ostream& out) {
    out << report_csv(results);
    if (!out) throw IoError("emit_report: write failed");
}

void emit_report(const std::vector<ScenarioResult>& results,
                 const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("emit_report: cannot open " + path);
    emit_report(results, out);
}

} // namespace weaksim
