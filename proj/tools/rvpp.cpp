// Command-line entry points: validate a config, run a robust DAM+SRM solve,
// run the multi-session pipeline, allocate profit by marginal contribution,
// or sweep demand-flexibility levels. Exit codes: 0 success, 2 input error,
// 3 solver failure.

#include <rvpp/rvpp.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

namespace {

using namespace rvpp;

struct CommonArgs {
    std::string config_path;
    std::string strategy = "balanced";
    std::string out_dir = "out";
    std::string solver;
    double eps = 0.0;
    int max_iters = 0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_strategy = true) {
    cmd->add_option("--config", a.config_path, "instance configuration (JSON)")->required();
    if (with_strategy)
        cmd->add_option("--strategy", a.strategy, "optimistic | balanced | pessimistic")
            ->check(CLI::IsMember({"optimistic", "balanced", "pessimistic"}));
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--solver", a.solver, "bundled | external")
        ->check(CLI::IsMember({"bundled", "external"}));
    cmd->add_option("--eps", a.eps, "CCG relative convergence tolerance");
    cmd->add_option("--max-iters", a.max_iters, "CCG iteration limit");
}

LoadedConfig load_and_select(const CommonArgs& a) {
    LoadedConfig lc = load_config(a.config_path);
    select_strategy(lc.scenario, a.strategy);
    if (!a.solver.empty()) lc.solver.backend = a.solver;
    if (a.eps > 0.0) lc.robust.eps_rel = a.eps;
    if (a.max_iters > 0) lc.robust.max_iters = a.max_iters;
    if (lc.solver.backend == "external" && lc.solver.external_cmd.empty()) {
        const char* env = std::getenv("RVPP_SOLVER_CMD");
        if (env) lc.solver.external_cmd = env;
    }
    return lc;
}

const SessionSpec& dam_srm_session(const ScenarioData& sc) {
    for (const auto& s : sc.sessions)
        if (s.kind == SessionKind::DamSrmJoint) return s;
    throw SchemaError("/sessions", "no dam_srm session in config");
}

int cmd_validate(const CommonArgs& a) {
    LoadedConfig lc = load_config(a.config_path); // load_config validates
    const auto v = validate(lc.scenario);
    if (v.empty()) {
        std::cout << "ok: " << a.config_path << " (" << lc.scenario.periods() << " periods, "
                  << lc.scenario.dispatchable.size() + lc.scenario.non_dispatchable.size() +
                         lc.scenario.csp.size() + lc.scenario.flexible_demand.size()
                  << " units)\n";
        return 0;
    }
    for (const auto& x : v) std::cerr << x.message << "\n";
    return 2;
}

int cmd_solve(const CommonArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    LoadedConfig lc = load_and_select(a);
    const SessionSpec& sess = dam_srm_session(lc.scenario);
    RobustSolution rs = ccg_solve(lc.scenario, sess, lc.robust, lc.solver);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ReportBundle rb;
    write_report(rb, a.out_dir, "schedules.csv", schedule_csv(lc.scenario, rs.nominal_schedule));
    write_report(rb, a.out_dir, "economics.csv", session_economics_csv(lc.scenario, rs));
    write_report(rb, a.out_dir, "ccg_trace.csv", trace_csv(rs.trace));
    write_report(rb, a.out_dir, "run_meta.json",
                 run_meta_json(a.strategy, lc.scenario, rs.gap, wall));
    std::cout << "worst-case profit: " << rs.worst_profit / 1000.0 << " kEUR (gap "
              << rs.gap << ", " << rs.trace.size() << " iterations)\n";
    for (const auto& f : rb.files) std::cout << "wrote " << f << "\n";
    if (rs.slack_total > 1e-6)
        std::cerr << "warning: nonzero balance slack " << rs.slack_total << " MW in the master\n";
    return rs.status == RobustSolution::Status::MasterInfeasible ? 3 : 0;
}

int cmd_pipeline(const CommonArgs& a, bool frozen) {
    const auto t0 = std::chrono::steady_clock::now();
    LoadedConfig lc = load_and_select(a);
    PipelineOptions po;
    po.frozen_commitments = frozen;
    PipelineResult pr = run_pipeline(lc.scenario, lc.robust, lc.solver, po);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (pr.aborted) {
        std::cerr << "pipeline aborted at " << pr.abort_reason << "\n";
        return 3;
    }
    ReportBundle rb;
    write_report(rb, a.out_dir, "economics.csv", pipeline_economics_csv(pr));
    write_report(rb, a.out_dir, "trades.csv", trades_csv(pr, lc.scenario));
    write_report(rb, a.out_dir, "schedules.csv", schedule_csv(lc.scenario, pr.final_schedule));
    double worst_gap = 0.0;
    for (const auto& s : pr.sessions) worst_gap = std::max(worst_gap, s.solution.gap);
    write_report(rb, a.out_dir, "run_meta.json",
                 run_meta_json(a.strategy, lc.scenario, worst_gap, wall));
    std::cout << "pipeline profit: " << pr.total_profit / 1000.0 << " kEUR over "
              << pr.sessions.size() << " sessions\n";
    for (const auto& f : rb.files) std::cout << "wrote " << f << "\n";
    return 0;
}

int cmd_allocate(const CommonArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    LoadedConfig lc = load_and_select(a);
    TechnologyPartition part = default_partition(lc.scenario);
    ProfitMap pm = profit_suite(lc.scenario, part, lc.robust, lc.solver);
    AllocationReport rep = marginal_contribution(pm, part);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ReportBundle rb;
    write_report(rb, a.out_dir, "allocation.csv", allocation_csv(rep));
    write_report(rb, a.out_dir, "run_meta.json", run_meta_json(a.strategy, lc.scenario, 0.0, wall));
    std::cout << "coalition profit " << rep.full / 1000.0 << " kEUR, surplus "
              << rep.delta_pi / 1000.0 << " kEUR\n";
    for (const auto& [g, row] : rep.rows)
        std::cout << "  " << g << ": allocated " << row.allocated / 1000.0 << " kEUR\n";
    for (const auto& f : rb.files) std::cout << "wrote " << f << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& levels_str) {
    LoadedConfig lc = load_and_select(a);
    std::vector<double> levels;
    std::stringstream ss(levels_str);
    std::string tok;
    while (std::getline(ss, tok, ',')) levels.push_back(std::stod(tok));
    if (levels.empty()) throw SchemaError("/flex-levels", "no levels given");

    std::vector<FlexSweepRow> rows;
    for (double pct : levels) {
        ScenarioData sc = lc.scenario;
        for (auto& fd : sc.flexible_demand) fd.flexibility_fraction = pct / 100.0;
        const SessionSpec& sess = dam_srm_session(sc);
        RobustSolution rs = ccg_solve(sc, sess, lc.robust, lc.solver);
        FlexSweepRow r;
        r.flexibility_pct = pct;
        const double dt = sc.grid.step_hours;
        for (int t = 0; t < sc.grid.periods; ++t) {
            r.dam_revenue += sc.dam_price.nominal[t] * rs.first_stage.pe[t] * dt;
            r.srm_revenue += sc.srm_up_price.nominal[t] * rs.first_stage.rvup[t] +
                             sc.srm_down_price.nominal[t] * rs.first_stage.rvdn[t];
        }
        r.cost = schedule_cost(sc, rs.nominal_schedule);
        r.profit = r.dam_revenue + r.srm_revenue - r.cost;
        rows.push_back(r);
        std::cout << "flex " << pct << "%: profit " << r.profit / 1000.0 << " kEUR\n";
    }
    ReportBundle rb;
    write_report(rb, a.out_dir, "flex_sweep.csv", sweep_csv(rows));
    for (const auto& f : rb.files) std::cout << "wrote " << f << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"renewable virtual power plant multi-market scheduler"};
    app.require_subcommand(1);

    CommonArgs a;
    bool frozen = false;
    std::string flex_levels = "0,10,20,30";

    CLI::App* v = app.add_subcommand("validate", "check a config against the schema");
    add_common(v, a, false);
    CLI::App* s = app.add_subcommand("solve", "robust DAM+SRM co-optimization");
    add_common(s, a);
    CLI::App* p = app.add_subcommand("pipeline", "sequential DAM+SRM, SRM, IDM sessions");
    add_common(p, a);
    p->add_flag("--frozen-commitments", frozen, "keep session-1 commitments in later sessions");
    CLI::App* al = app.add_subcommand("allocate", "marginal-contribution profit allocation");
    add_common(al, a);
    CLI::App* sw = app.add_subcommand("sweep-flex", "profit vs demand-flexibility level");
    add_common(sw, a);
    sw->add_option("--flex-levels", flex_levels, "comma-separated percentages");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(v)) return cmd_validate(a);
        if (app.got_subcommand(s)) return cmd_solve(a);
        if (app.got_subcommand(p)) return cmd_pipeline(a, frozen);
        if (app.got_subcommand(al)) return cmd_allocate(a);
        if (app.got_subcommand(sw)) return cmd_sweep(a, flex_levels);
    } catch (const rvpp::SchemaError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rvpp::LengthMismatch& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rvpp::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const rvpp::UnknownFixing& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
