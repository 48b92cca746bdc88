#include "weaksim/errors.hpp"
#include "weaksim/harness.hpp"
#include "weaksim/measurement.hpp"
#include "weaksim/scenario.hpp"
#include "weaksim/system.hpp"
#include "weaksim/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace weaksim;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
}

std::vector<double> parse_ladder(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
                ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw BadScenario("bad g-ladder entry: '" + item + "'");
        }
    }
    if (out.empty()) throw BadScenario("empty g ladder");
    return out;
}

// columns of kReportHeader we need back out of a result CSV
struct ResultRow {
    std::string id;
    double g = 0.0;
    double mean_q_i = 0.0, mean_q_f = 0.0;
    double mean_p_i = 0.0, mean_p_f = 0.0;
    double var_p = 0.0, dvarq_dt = 0.0;
};

std::vector<ResultRow> read_result_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw IoError(path + " is empty");

    std::vector<std::string> names;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) names.push_back(col);
    }
    auto column = [&](const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return i;
        throw IoError(path + ": missing column '" + name + "'");
    };
    const std::size_t c_id = column("scenario_id");
    const std::size_t c_g = column("g");
    const std::size_t c_qi = column("mean_q_i");
    const std::size_t c_qf = column("mean_q_f_sim");
    const std::size_t c_pi = column("mean_p_i");
    const std::size_t c_pf = column("mean_p_f_sim");
    const std::size_t c_vp = column("var_p");
    const std::size_t c_rate = column("dvarq_dt");

    std::vector<ResultRow> rows;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < names.size())
            throw IoError(path + ":" + std::to_string(line_no) +
                          ": expected " + std::to_string(names.size()) +
                          " columns, got " + std::to_string(cells.size()));
        auto value = [&](std::size_t i) {
            try {
                return std::stod(cells[i]);
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(line_no) +
                              ": bad number '" + cells[i] + "'");
            }
        };
        ResultRow row;
        row.id = cells[c_id];
        row.g = value(c_g);
        row.mean_q_i = value(c_qi);
        row.mean_q_f = value(c_qf);
        row.mean_p_i = value(c_pi);
        row.mean_p_f = value(c_pf);
        row.var_p = value(c_vp);
        row.dvarq_dt = value(c_rate);
        rows.push_back(std::move(row));
    }
    return rows;
}

SystemState state_from_text(const std::string& text) {
    const std::vector<cplx> entries = parse_complex_list(text);
    return make_state(Eigen::Map<const Eigen::VectorXcd>(
        entries.data(), static_cast<Eigen::Index>(entries.size())));
}

int run_weak_value(const std::string& obs_text, const std::string& psi_i_text,
                   const std::string& psi_f_text, double threshold) {
    const Observable obs = resolve_observable(obs_text);
    const WeakValue w = weak_value(obs, state_from_text(psi_i_text),
                                   state_from_text(psi_f_text), threshold);
    std::cout << g17(w.a) << " " << g17(w.b) << "\n";
    return 0;
}

int run_simulate(const std::string& scenario_path, const std::string& backend,
                 const std::string& out_path, const std::string& dump_path) {
    Scenario sc = load_scenario(scenario_path);
    if (!backend.empty()) sc.backend = parse_backend(backend);
    const ScenarioResult res = run_scenario(sc);
    write_text(out_path, report_csv({res}));
    if (!dump_path.empty()) {
        const PointerState pointer = scenario_pointer(sc);
        PostSelectedPointer alpha;
        switch (sc.backend) {
            case Backend::exact:
                alpha = couple_postselect_exact(sc.coupling, pointer);
                break;
            case Backend::first_order:
                alpha = couple_postselect_first_order(sc.coupling, pointer,
                                                      sc.overlap_threshold);
                break;
            case Backend::weak_exp:
                alpha = couple_postselect_weak_exp(sc.coupling, pointer,
                                                   sc.overlap_threshold);
                break;
        }
        save_pointer(conditioned_pointer(alpha), dump_path);
    }
    return 0;
}

int run_sweep(const std::string& scenario_path, const std::string& ladder_text,
              const std::string& out_path) {
    const Scenario sc = load_scenario(scenario_path);
    const ConvergenceReport rep = sweep_g(sc, parse_ladder(ladder_text));
    write_text(out_path, report_csv(rep.results));
    for (const ConvergenceChannel* ch :
         {&rep.q_channel, &rep.p_channel, &rep.succ_channel}) {
        std::cerr << ch->name << " slope " << g17(ch->slope)
                  << (ch->at_floor ? " (residuals at floor)" : "") << "\n";
    }
    return 0;
}

int run_verify(std::uint64_t seed, int cases, const std::string& report_path) {
    BatteryOptions opt;
    opt.seed = seed;
    if (cases > 0) {
        opt.unconditional_cases = cases;
        opt.oracle_cases = cases;
        opt.roundtrip_cases = cases;
    }
    const std::vector<CriterionResult> results = run_acceptance_battery(opt);
    bool all_pass = true;
    for (const CriterionResult& res : results) {
        all_pass = all_pass && res.pass;
        std::printf("[%s] criterion %2d: %s (%.2fs) %s\n",
                    res.pass ? "PASS" : "FAIL", res.id, res.name.c_str(),
                    res.seconds, res.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n",
                static_cast<std::size_t>(
                    std::count_if(results.begin(), results.end(),
                                  [](const CriterionResult& r) { return r.pass; })),
                results.size());
    if (!report_path.empty()) write_text(report_path, battery_report_csv(opt));
    return all_pass ? 0 : 1;
}

int run_estimate(const std::string& from_path, double mass) {
    const std::vector<ResultRow> rows = read_result_csv(from_path);
    std::cout << "scenario_id,a_est,b_est\n";
    for (const ResultRow& row : rows) {
        const WeakValue w = estimate_weak_value(
            row.mean_q_f - row.mean_q_i, row.mean_p_f - row.mean_p_i, row.g,
            row.var_p, row.dvarq_dt, mass);
        std::cout << row.id << "," << g17(w.a) << "," << g17(w.b) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak-measurement pointer simulation toolkit"};
    app.require_subcommand(1);

    auto* wv = app.add_subcommand(
        "weak-value", "evaluate <psi_f|A|psi_i> / <psi_f|psi_i>, printed as 'a b'");
    std::string obs_text, psi_i_text, psi_f_text;
    double threshold = kDefaultOverlapThreshold;
    wv->add_option("--observable", obs_text,
                   "pauli-x|pauli-y|pauli-z|identity, inline rows "
                   "('1,0;0,-1'), or a matrix file")
        ->required();
    wv->add_option("--psi-i", psi_i_text, "preparation, e.g. '1,1'")->required();
    wv->add_option("--psi-f", psi_f_text, "post-selection, e.g. '1,i'")->required();
    wv->add_option("--overlap-threshold", threshold,
                   "refuse post-selections with smaller |<f|i>|");

    auto* sim = app.add_subcommand("simulate",
                                   "run one scenario, emit a result CSV row");
    std::string scenario_path, backend, out_path, dump_path;
    sim->add_option("--scenario", scenario_path, "scenario file")->required();
    sim->add_option("--backend", backend, "exact|first-order|weak-exp");
    sim->add_option("--out", out_path, "write CSV here instead of stdout");
    sim->add_option("--dump-state", dump_path,
                    "save the post-selected pointer samples");

    auto* sw = app.add_subcommand(
        "sweep", "rerun a scenario across a g ladder; slopes go to stderr");
    std::string sweep_scenario_path, ladder_text, sweep_out;
    sw->add_option("--scenario", sweep_scenario_path, "scenario file")->required();
    sw->add_option("--g-ladder", ladder_text, "comma list, e.g. '1e-3,3e-3,1e-2'")
        ->required();
    sw->add_option("--out", sweep_out, "write CSV here instead of stdout");

    auto* ver = app.add_subcommand("verify", "run the acceptance battery");
    std::uint64_t seed = 7;
    int cases = 0;
    std::string report_path;
    ver->add_option("--seed", seed, "battery seed (default 7)");
    ver->add_option("--cases", cases,
                    "override the case count of every randomized battery");
    ver->add_option("--report", report_path, "write the battery CSV here");

    auto* est = app.add_subcommand(
        "estimate", "invert the shift law on result CSV rows");
    std::string from_path;
    double mass = 1.0;
    est->add_option("--from", from_path, "result CSV")->required();
    est->add_option("--mass", mass,
                    "pointer mass used when the rows were produced");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (wv->parsed())
            return run_weak_value(obs_text, psi_i_text, psi_f_text, threshold);
        if (sim->parsed())
            return run_simulate(scenario_path, backend, out_path, dump_path);
        if (sw->parsed())
            return run_sweep(sweep_scenario_path, ladder_text, sweep_out);
        if (ver->parsed()) return run_verify(seed, cases, report_path);
        if (est->parsed()) return run_estimate(from_path, mass);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 2;
}
