#pragma once

// Report emission. Machine CSVs (schedules, trades, traces) carry full
// precision; the economics and allocation tables mirror the human layouts in
// kEUR rounded to two decimals. All files are written atomically.

#include "allocation.hpp"
#include "csv.hpp"
#include "pipeline.hpp"

#include <filesystem>
#include <iomanip>

namespace rvpp {

struct ReportBundle {
    std::vector<std::string> files;
};

namespace detail {

inline std::string num_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string keur2(double eur) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", eur / 1000.0);
    return buf;
}

} // namespace detail

/// Per-unit dispatch series plus the plant positions (the data behind the
/// unit scheduling and reserve figures).
inline std::string schedule_csv(const ScenarioData& sc, const Schedule& s) {
    std::ostringstream os;
    os << "unit,period,energy_MW,reserve_up_MW,reserve_down_MW,commitment,startup,"
          "sf_thermal_MW,ts_charge_MW,ts_discharge_MW,ts_energy_MWh,profile\n";
    const int T = sc.grid.periods;
    for (const auto& [name, us] : s.units) {
        for (int t = 0; t < T; ++t) {
            os << csv_escape(name) << ',' << t + 1 << ',' << detail::num_full(us.p[t]) << ','
               << detail::num_full(us.r_up[t]) << ',' << detail::num_full(us.r_down[t]) << ',';
            if (!us.commitment.empty())
                os << detail::num_full(us.commitment[t]) << ',' << detail::num_full(us.startup[t]);
            else
                os << ',';
            os << ',';
            if (!us.p_sf.empty())
                os << detail::num_full(us.p_sf[t]) << ',' << detail::num_full(us.ts_charge[t])
                   << ',' << detail::num_full(us.ts_discharge[t]) << ','
                   << detail::num_full(us.ts_energy[t]);
            else
                os << ",,,";
            os << ',';
            if (us.chosen_profile >= 0) os << us.chosen_profile;
            os << '\n';
        }
    }
    for (int t = 0; t < T; ++t)
        os << "RVPP," << t + 1 << ',' << detail::num_full(s.energy_pos[t]) << ','
           << detail::num_full(s.reserve_up_pos[t]) << ','
           << detail::num_full(s.reserve_down_pos[t]) << ",,,,,,,\n";
    return os.str();
}

/// Cumulative and incremental trades per session and period.
inline std::string trades_csv(const PipelineResult& pr, const ScenarioData& sc) {
    std::ostringstream os;
    os << "session,period,cumulative_energy_MW,incremental_energy_MW,reserve_up_MW,"
          "reserve_down_MW\n";
    const int T = sc.grid.periods;
    std::vector<double> cum(T, 0.0);
    bool reserves_cleared = false;
    std::vector<double> ru(T, 0.0), rd(T, 0.0);
    for (size_t si = 0; si < pr.ledger.entries.size(); ++si) {
        const auto& e = pr.ledger.entries[si];
        for (int t = 0; t < T; ++t) cum[t] += e.incremental[t];
        if (pr.sessions[si].session.kind == SessionKind::SrmOnly) {
            reserves_cleared = true;
            ru = pr.ledger.reserve_up;
            rd = pr.ledger.reserve_down;
        }
        for (int t = 0; t < T; ++t) {
            os << csv_escape(e.session) << ',' << t + 1 << ',' << detail::num_full(cum[t]) << ','
               << detail::num_full(e.incremental[t]) << ',';
            if (reserves_cleared)
                os << detail::num_full(ru[t]) << ',' << detail::num_full(rd[t]);
            else
                os << ',';
            os << '\n';
        }
    }
    return os.str();
}

/// Economic results across the market sessions (kEUR, 2 decimals).
inline std::string pipeline_economics_csv(const PipelineResult& pr) {
    std::ostringstream os;
    os << "metric,value_kEUR\n";
    for (const auto& s : pr.sessions) {
        std::string label;
        switch (s.session.kind) {
            case SessionKind::DamSrmJoint: label = "DAM revenue"; break;
            case SessionKind::SrmOnly: label = "SRM revenue"; break;
            case SessionKind::Idm:
                label = "IDM#" + std::to_string(s.session.idm_session) + " revenue";
                break;
        }
        os << csv_escape(label) << ',' << detail::keur2(s.revenue) << '\n';
    }
    os << "Cost," << detail::keur2(pr.total_cost) << '\n';
    os << "Profit," << detail::keur2(pr.total_profit) << '\n';
    return os.str();
}

/// One DAM+SRM robust solve in the same economics layout.
inline std::string session_economics_csv(const ScenarioData& sc, const RobustSolution& rs) {
    const double dt = sc.grid.step_hours;
    double dam = 0.0, srm = 0.0;
    for (int t = 0; t < sc.grid.periods; ++t) {
        dam += sc.dam_price.nominal[t] * rs.first_stage.pe[t] * dt;
        srm += sc.srm_up_price.nominal[t] * rs.first_stage.rvup[t] +
               sc.srm_down_price.nominal[t] * rs.first_stage.rvdn[t];
    }
    const double cost = schedule_cost(sc, rs.nominal_schedule);
    std::ostringstream os;
    os << "metric,value_kEUR\n";
    os << "DAM revenue," << detail::keur2(dam) << '\n';
    os << "SRM revenue," << detail::keur2(srm) << '\n';
    os << "Cost," << detail::keur2(cost) << '\n';
    os << "Profit," << detail::keur2(dam + srm - cost) << '\n';
    os << "Worst-case profit," << detail::keur2(rs.worst_profit) << '\n';
    return os.str();
}

struct FlexSweepRow {
    double flexibility_pct = 0.0;
    double dam_revenue = 0.0, srm_revenue = 0.0, cost = 0.0, profit = 0.0; // EUR
};

inline std::string sweep_csv(const std::vector<FlexSweepRow>& rows) {
    std::ostringstream os;
    os << "Demand flexibility [%],DAM revenue [k€],SRM revenue [k€],Cost [k€],"
          "Profit [k€]\n";
    for (const auto& r : rows)
        os << r.flexibility_pct << ',' << detail::keur2(r.dam_revenue) << ','
           << detail::keur2(r.srm_revenue) << ',' << detail::keur2(r.cost) << ','
           << detail::keur2(r.profit) << '\n';
    return os.str();
}

inline std::string allocation_csv(const AllocationReport& rep) {
    std::ostringstream os;
    os << "technology,ρ_u [k€/MW],Π^{RVPP\\u} [k€],Π_u^{solo} [k€],"
          "Π_u^{alloc} [k€]\n";
    for (const auto& [g, row] : rep.rows) {
        char rho[40];
        std::snprintf(rho, sizeof rho, "%.3f", row.rho / 1000.0);
        os << csv_escape(g) << ',' << rho << ',' << detail::keur2(row.without) << ','
           << detail::keur2(row.solo) << ',' << detail::keur2(row.allocated) << '\n';
    }
    os << "RVPP total,," << detail::keur2(rep.full) << ",," << detail::keur2(rep.full) << '\n';
    return os.str();
}

inline std::string trace_csv(const std::vector<IterationRecord>& trace) {
    std::ostringstream os;
    os << "iter,UB,LB,gap,chosen-family,deviated-periods\n";
    for (const auto& r : trace) {
        std::string fam = r.realization_summary, periods;
        if (const auto at = fam.find('@'); at != std::string::npos) {
            periods = fam.substr(at + 1);
            fam = fam.substr(0, at);
        }
        os << r.iter << ',' << detail::num_full(r.upper) << ',' << detail::num_full(r.lower) << ','
           << detail::num_full(r.gap) << ',' << csv_escape(fam) << ',' << csv_escape(periods)
           << '\n';
    }
    return os.str();
}

inline std::string run_meta_json(const std::string& strategy, const ScenarioData& sc,
                                 double gap, double wall_s) {
    std::ostringstream os;
    os << "{\n  \"strategy\": \"" << strategy << "\",\n  \"gap\": " << detail::num_full(gap)
       << ",\n  \"wall_time_s\": " << detail::num_full(wall_s) << ",\n  \"budgets\": {";
    bool first = true;
    if (!sc.sessions.empty())
        for (const auto& [f, g] : sc.sessions.front().budgets.gamma) {
            if (!first) os << ", ";
            first = false;
            os << "\"" << f.str() << "\": " << g;
        }
    os << "}\n}\n";
    return os.str();
}

inline void write_report(ReportBundle& rb, const std::string& out_dir, const std::string& name,
                         const std::string& content) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path = (fs::path(out_dir) / name).string();
    write_text_file_atomic(path, content);
    rb.files.push_back(path);
}

} // namespace rvpp
