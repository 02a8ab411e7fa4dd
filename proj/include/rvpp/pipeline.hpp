#pragma once

// Sequences the market calendar: DAM+SRM co-optimization (only the energy bid
// is committed), SRM re-optimization with the energy fixed, then the intraday
// sessions with reserves frozen and cumulative energy re-optimized inside each
// window. Each session's cleared results are pinned into the next model by
// name, and the ledger accumulates positions and incremental revenues.

#include "robust.hpp"

#include <numeric>

namespace rvpp {

struct WindowMismatch : std::runtime_error {
    explicit WindowMismatch(const std::string& w) : std::runtime_error(w) {}
};

struct PositionLedger {
    std::vector<double> energy;       // cumulative net MW per period, sell positive
    std::vector<double> reserve_up, reserve_down;
    struct Entry {
        std::string session;
        std::vector<double> incremental; // energy MW per period (zero outside window)
        double revenue = 0.0;            // EUR
    };
    std::vector<Entry> entries;
};

struct SessionResult {
    SessionSpec session;
    RobustSolution solution;
    std::vector<double> incremental;
    double revenue = 0.0; // EUR, at the session's prices
    double cost = 0.0;    // EUR, operating cost of the session's nominal dispatch
};

struct PipelineResult {
    std::vector<SessionResult> sessions;
    PositionLedger ledger;
    double total_revenue = 0.0;
    double total_cost = 0.0;  // operating cost of the final schedule
    double total_profit = 0.0;
    Schedule final_schedule;
    bool aborted = false;
    std::string abort_reason;
};

/// Incremental revenue of a position change at the session's prices.
inline double session_revenue(const std::vector<double>& prior, const std::vector<double>& now,
                              const std::vector<double>& prices, double dt, int first = 0) {
    if (prior.size() != now.size())
        throw WindowMismatch("position vectors differ in length");
    double v = 0.0;
    for (size_t t = 0; t < now.size(); ++t) {
        const size_t pi = t >= (size_t)first ? t - first : 0;
        if (t < (size_t)first || pi >= prices.size()) continue;
        v += prices[pi] * (now[t] - prior[t]) * dt;
    }
    return v;
}

/// Pins previously cleared results for the given session kind.
inline Fixings fix_cleared(const SessionSpec& sess, const PositionLedger& ledger, int periods) {
    Fixings fx;
    if (sess.kind == SessionKind::DamSrmJoint) return fx;
    if ((int)ledger.energy.size() != periods)
        throw WindowMismatch("ledger does not cover the time grid");
    if (sess.kind == SessionKind::SrmOnly) {
        for (int t = 0; t < periods; ++t)
            fx.pin("pE_t" + std::to_string(t), ledger.energy[t]);
        return fx;
    }
    // IDM: reserves frozen everywhere, energy pinned outside the window
    if (ledger.reserve_up.empty())
        throw WindowMismatch("IDM session before reserves were cleared");
    for (int t = 0; t < periods; ++t) {
        fx.pin("rvup_t" + std::to_string(t), ledger.reserve_up[t]);
        fx.pin("rvdn_t" + std::to_string(t), ledger.reserve_down[t]);
        if (t < sess.window_first - 1 || t > sess.window_last - 1)
            fx.pin("pE_t" + std::to_string(t), ledger.energy[t]);
    }
    return fx;
}

/// Narrows forecast bands toward their nominal edge and price deviations
/// toward zero, then applies explicit replacements.
inline ScenarioData apply_overlay(const ScenarioData& sc, const ForecastOverlay& ov) {
    ScenarioData out = sc;
    const double keep = 1.0 - ov.narrow_bands;
    if (ov.narrow_bands > 0.0) {
        for (auto& u : out.non_dispatchable)
            for (size_t t = 0; t < u.band.lower.size(); ++t)
                u.band.lower[t] = u.band.upper[t] - keep * (u.band.upper[t] - u.band.lower[t]);
        for (auto& u : out.csp)
            for (size_t t = 0; t < u.sf_band.lower.size(); ++t)
                u.sf_band.lower[t] =
                    u.sf_band.upper[t] - keep * (u.sf_band.upper[t] - u.sf_band.lower[t]);
    }
    if (ov.narrow_price_deviation > 0.0) {
        const double pk = 1.0 - ov.narrow_price_deviation;
        auto shrink = [&](PriceBand& b) {
            for (double& d : b.deviation) d *= pk;
        };
        shrink(out.dam_price);
        shrink(out.srm_up_price);
        shrink(out.srm_down_price);
        for (auto& b : out.idm_prices) shrink(b);
    }
    for (const auto& [name, band] : ov.replace_bands) {
        for (auto& u : out.non_dispatchable)
            if (u.name == name) u.band = band;
        for (auto& u : out.csp)
            if (u.name == name) u.sf_band = band;
    }
    for (const auto& pb : ov.replace_prices) {
        if (pb.product == Product::EnergyDam) out.dam_price = pb;
        else if (pb.product == Product::ReserveUp) out.srm_up_price = pb;
        else if (pb.product == Product::ReserveDown) out.srm_down_price = pb;
        else
            for (auto& b : out.idm_prices)
                if (b.idm_session == pb.idm_session) b = pb;
    }
    return out;
}

inline double schedule_cost(const ScenarioData& sc, const Schedule& s) {
    const double dt = sc.grid.step_hours;
    double c = 0.0;
    auto add = [&](const std::string& name, double unit_cost) {
        const auto& us = s.units.at(name);
        for (double p : us.p) c += unit_cost * p * dt;
    };
    for (const auto& u : sc.dispatchable) add(u.name, u.cost);
    for (const auto& u : sc.non_dispatchable) add(u.name, u.cost);
    for (const auto& u : sc.csp) add(u.name, u.cost);
    return c;
}

struct PipelineOptions {
    bool frozen_commitments = false;
};

/// Runs the ordered session calendar; a failed session aborts with partial
/// results preserved.
inline PipelineResult run_pipeline(const ScenarioData& sc, const RobustOptions& ropt = {},
                                   const SolveOptions& sopt = {}, PipelineOptions popt = {}) {
    const int T = sc.grid.periods;
    const double dt = sc.grid.step_hours;
    PipelineResult out;
    out.ledger.energy.assign(T, 0.0);

    Fixings frozen;
    for (size_t si = 0; si < sc.sessions.size(); ++si) {
        const SessionSpec& sess = sc.sessions[si];
        const ScenarioData view = sess.overlay ? apply_overlay(sc, *sess.overlay) : sc;
        SessionResult sr;
        sr.session = sess;
        try {
            Fixings fx = fix_cleared(sess, out.ledger, T);
            if (popt.frozen_commitments && sess.kind != SessionKind::DamSrmJoint)
                fx.pins.insert(fx.pins.end(), frozen.pins.begin(), frozen.pins.end());
            const std::vector<double>* prior =
                sess.kind == SessionKind::Idm ? &out.ledger.energy : nullptr;
            sr.solution = ccg_solve(view, sess, ropt, sopt, fx, prior);
        } catch (const std::exception& e) {
            out.aborted = true;
            out.abort_reason = sess.label() + ": " + e.what();
            out.sessions.push_back(std::move(sr));
            return out;
        }
        const FirstStage& fs = sr.solution.first_stage;

        PositionLedger::Entry entry;
        entry.session = sess.label();
        entry.incremental.assign(T, 0.0);
        switch (sess.kind) {
            case SessionKind::DamSrmJoint: {
                // only the energy bid is committed in this session
                for (int t = 0; t < T; ++t) entry.incremental[t] = fs.pe[t];
                out.ledger.energy = fs.pe;
                sr.revenue = session_revenue(std::vector<double>(T, 0.0), fs.pe,
                                             view.dam_price.nominal, dt);
                if (popt.frozen_commitments) {
                    for (const auto& [name, cv] : fs.commit)
                        for (int t = 0; t < T; ++t)
                            frozen.pin("u_" + name + "_t" + std::to_string(t), cv[t]);
                    for (const auto& [name, m] : fs.profile) {
                        const FlexibleDemand* fd = nullptr;
                        for (const auto& f : sc.flexible_demand)
                            if (f.name == name) fd = &f;
                        for (int mm = 0; mm < (int)fd->profiles.size(); ++mm)
                            frozen.pin("prof_" + name + "_m" + std::to_string(mm),
                                       mm == m ? 1.0 : 0.0);
                    }
                }
                break;
            }
            case SessionKind::SrmOnly: {
                out.ledger.reserve_up = fs.rvup;
                out.ledger.reserve_down = fs.rvdn;
                for (int t = 0; t < T; ++t)
                    sr.revenue += view.srm_up_price.nominal[t] * fs.rvup[t] +
                                  view.srm_down_price.nominal[t] * fs.rvdn[t];
                break;
            }
            case SessionKind::Idm: {
                const PriceBand* pb = view.idm_price(sess.idm_session);
                sr.revenue = session_revenue(out.ledger.energy, fs.pe, pb->nominal, dt,
                                             sess.window_first - 1);
                for (int t = 0; t < T; ++t) entry.incremental[t] = fs.pe[t] - out.ledger.energy[t];
                out.ledger.energy = fs.pe;
                break;
            }
        }
        entry.revenue = sr.revenue;
        out.ledger.entries.push_back(std::move(entry));
        sr.incremental = out.ledger.entries.back().incremental;
        sr.cost = schedule_cost(sc, sr.solution.nominal_schedule);
        out.sessions.push_back(std::move(sr));
    }

    if (!out.sessions.empty()) {
        out.final_schedule = out.sessions.back().solution.nominal_schedule;
        out.total_cost = schedule_cost(sc, out.final_schedule);
    }
    for (const auto& s : out.sessions) out.total_revenue += s.revenue;
    out.total_profit = out.total_revenue - out.total_cost;
    return out;
}

} // namespace rvpp
