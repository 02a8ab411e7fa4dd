#pragma once

// Two-stage robust engine. Price (objective) uncertainty is handled exactly by
// dualizing the per-product budget LP onto the first-stage positions; quantity
// (rhs) uncertainty is handled by column-and-constraint generation against an
// adversary oracle. The adversary minimizes the recourse value over the budget
// set either by enumerating budget vertices or by solving the LP dual of the
// recourse with big-M linearized delta-dual products; every candidate it
// returns is audited by a direct recourse solve, and the certified bounds use
// the audited values only.

#include "milp.hpp"
#include "session_model.hpp"
#include "simplex.hpp"
#include "solver.hpp"

#include <functional>
#include <memory>
#include <set>
#include <sstream>

namespace rvpp {

struct BudgetViolated : std::runtime_error {
    explicit BudgetViolated(const std::string& w) : std::runtime_error(w) {}
};
struct EnumerationTooLarge : std::runtime_error {
    explicit EnumerationTooLarge(const std::string& w) : std::runtime_error(w) {}
};
struct GapNotClosed : std::runtime_error {
    explicit GapNotClosed(const std::string& w) : std::runtime_error(w) {}
};
struct MasterInfeasible : std::runtime_error {
    explicit MasterInfeasible(const std::string& w) : std::runtime_error(w) {}
};

struct RobustOptions {
    double eps_rel = 1e-4;
    int max_iters = 50;
    std::string adversary_mode = "dual_bigM"; // dual_bigM | enumerate
    double slack_penalty = 0.0;               // 0 -> 10x max nominal price
};

inline double default_slack_penalty(const ScenarioData& sc) {
    double m = 0.0;
    for (double v : sc.dam_price.nominal) m = std::max(m, std::abs(v));
    for (double v : sc.srm_up_price.nominal) m = std::max(m, std::abs(v));
    for (double v : sc.srm_down_price.nominal) m = std::max(m, std::abs(v));
    for (const auto& b : sc.idm_prices)
        for (double v : b.nominal) m = std::max(m, std::abs(v));
    return 10.0 * std::max(m, 1.0);
}

// ---------------------------------------------------------------------------
// price protection (exact dualization of the budget LP)

struct ProtectionBlock {
    FamilyId family;
    int gamma = 0;
    int z = -1;
    std::vector<int> q;
    std::vector<int> rows;
};

/// Robustifies one price product: subtracts Gamma*z + sum_t q_t from the
/// revenue and links z + q_t >= deviation_t * exposure_t. `exposure[t]` is a
/// linear expression over first-stage variables whose value is the absolute
/// traded quantity of the product in period t.
inline ProtectionBlock add_price_protection(
    SessionModelBuilder& b, const FamilyId& family, int gamma,
    const std::vector<std::vector<std::pair<int, double>>>& exposure,
    const std::vector<double>& deviation) {
    ProtectionBlock blk;
    blk.family = family;
    blk.gamma = gamma;
    if (gamma <= 0) return blk;
    MilpInstance& m = b.milp();
    const std::string label = mps_sanitize(family.str());
    blk.z = m.add_var("pz_" + label, 0.0, kInf);
    b.add_revenue_term(blk.z, -(double)gamma);
    for (int t = 0; t < (int)exposure.size(); ++t) {
        if (exposure[t].empty()) continue;
        const int qv = m.add_var("pq_" + label + "_t" + std::to_string(t), 0.0, kInf);
        blk.q.push_back(qv);
        b.add_revenue_term(qv, -1.0);
        std::vector<std::pair<int, double>> row{{blk.z, 1.0}, {qv, 1.0}};
        for (const auto& [j, c] : exposure[t]) row.emplace_back(j, -deviation[t] * c);
        blk.rows.push_back(m.add_row("Prot", RowSense::GE, 0.0, std::move(row)));
    }
    return blk;
}

/// Attaches protection for every price product the session's revenues expose,
/// using the session budgets. Call between construction and the first copy.
inline std::vector<ProtectionBlock> protect_session_prices(SessionModelBuilder& b,
                                                           const ScenarioData& sc,
                                                           const SessionSpec& sess) {
    std::vector<ProtectionBlock> blocks;
    const int T = sc.grid.periods;
    const double dt = sc.grid.step_hours;
    auto expr1 = [](int var, double coeff) {
        return std::vector<std::pair<int, double>>{{var, coeff}};
    };
    if (sess.has_revenue(Revenue::Energy)) {
        if (sess.kind == SessionKind::Idm) {
            const PriceBand* pb = sc.idm_price(sess.idm_session);
            const FamilyId fam{FamilyId::IdmPrice, "", sess.idm_session};
            std::vector<std::vector<std::pair<int, double>>> expo(T);
            std::vector<double> dev(T, 0.0);
            for (int t = b.window_first(); t <= b.window_last(); ++t) {
                expo[t] = {{b.inc_pos(t), dt}, {b.inc_neg(t), dt}};
                dev[t] = pb->deviation[t - b.window_first()];
            }
            blocks.push_back(add_price_protection(b, fam, sess.budgets.get(fam), expo, dev));
        } else {
            const FamilyId fam{FamilyId::DamPrice, "", 0};
            std::vector<std::vector<std::pair<int, double>>> expo(T);
            for (int t = 0; t < T; ++t) expo[t] = {{b.sell(t), dt}, {b.buy(t), dt}};
            blocks.push_back(
                add_price_protection(b, fam, sess.budgets.get(fam), expo, sc.dam_price.deviation));
        }
    }
    if (sess.has_revenue(Revenue::ReserveUp)) {
        const FamilyId fam{FamilyId::SrmUpPrice, "", 0};
        std::vector<std::vector<std::pair<int, double>>> expo(T);
        for (int t = 0; t < T; ++t) expo[t] = expr1(b.rvup(t), 1.0);
        blocks.push_back(
            add_price_protection(b, fam, sess.budgets.get(fam), expo, sc.srm_up_price.deviation));
    }
    if (sess.has_revenue(Revenue::ReserveDown)) {
        const FamilyId fam{FamilyId::SrmDownPrice, "", 0};
        std::vector<std::vector<std::pair<int, double>>> expo(T);
        for (int t = 0; t < T; ++t) expo[t] = expr1(b.rvdn(t), 1.0);
        blocks.push_back(
            add_price_protection(b, fam, sess.budgets.get(fam), expo, sc.srm_down_price.deviation));
    }
    return blocks;
}

/// Greedy oracle for the inner price problem at fixed numeric positions: the
/// worst loss deviates the Gamma periods with the largest deviation*exposure.
inline std::pair<Realization, double> worst_case_prices(const std::vector<double>& exposure,
                                                        const std::vector<double>& deviation,
                                                        int gamma, const FamilyId& family = {}) {
    const int T = (int)exposure.size();
    std::vector<std::pair<double, int>> impact(T);
    for (int t = 0; t < T; ++t) impact[t] = {deviation[t] * std::max(exposure[t], 0.0), t};
    std::sort(impact.begin(), impact.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    Realization xi;
    auto& d = xi.delta[family];
    d.assign(T, 0.0);
    double loss = 0.0;
    for (int k = 0; k < std::min(gamma, T); ++k) {
        d[impact[k].second] = 1.0;
        loss += impact[k].first;
    }
    return {xi, loss};
}

// ---------------------------------------------------------------------------
// realize: apply one deviation vector to the uncertain series of a scenario

inline ScenarioData realize(const ScenarioData& sc, const Realization& xi,
                            const BudgetSet* budgets = nullptr) {
    const int T = sc.grid.periods;
    for (const auto& [fam, d] : xi.delta) {
        if ((int)d.size() != T)
            throw BudgetViolated("deviation vector length mismatch for " + fam.str());
        double used = 0.0;
        for (double v : d) {
            if (v < -1e-9 || v > 1.0 + 1e-9)
                throw BudgetViolated("deviation outside [0,1] for " + fam.str());
            used += v;
        }
        if (budgets && used > budgets->get(fam) + 1e-9)
            throw BudgetViolated("budget exceeded for " + fam.str());
    }
    ScenarioData out = sc;
    auto delta_of = [&](const FamilyId& f) -> const std::vector<double>* {
        auto it = xi.delta.find(f);
        return it == xi.delta.end() ? nullptr : &it->second;
    };
    for (auto& u : out.non_dispatchable)
        if (const auto* d = delta_of({FamilyId::Ndrs, u.name, 0}))
            for (int t = 0; t < T; ++t)
                u.band.upper[t] -= (*d)[t] * (u.band.upper[t] - u.band.lower[t]);
    for (auto& u : out.csp)
        if (const auto* d = delta_of({FamilyId::CspThermal, u.name, 0}))
            for (int t = 0; t < T; ++t)
                u.sf_band.upper[t] -= (*d)[t] * (u.sf_band.upper[t] - u.sf_band.lower[t]);
    for (auto& u : out.flexible_demand)
        if (const auto* d = delta_of({FamilyId::FdConsumption, u.name, 0})) {
            for (auto& prof : u.profiles)
                for (int t = 0; t < T; ++t) {
                    const double lo = std::clamp(prof[t] * (1.0 - u.flexibility_fraction), u.p_min, u.p_max);
                    const double hi = std::clamp(prof[t] * (1.0 + u.flexibility_fraction), u.p_min, u.p_max);
                    prof[t] = lo + (*d)[t] * (hi - lo);
                }
            u.flexibility_fraction = 0.0;
        }
    return out;
}

// ---------------------------------------------------------------------------
// first-stage values and the fixed-first-stage recourse model

struct FirstStage {
    std::vector<double> pe, rvup, rvdn;
    std::map<std::string, std::vector<double>> commit, start;
    std::map<std::string, int> profile;
};

inline FirstStage extract_first_stage(const SessionModelBuilder& b, const ScenarioData& sc,
                                      const std::vector<double>& x) {
    const int T = sc.grid.periods;
    FirstStage fs;
    fs.pe.resize(T);
    fs.rvup.resize(T);
    fs.rvdn.resize(T);
    for (int t = 0; t < T; ++t) {
        fs.pe[t] = x[b.pe(t)];
        fs.rvup[t] = x[b.rvup(t)];
        fs.rvdn[t] = x[b.rvdn(t)];
    }
    auto grab = [&](const std::string& name) {
        auto& c = fs.commit[name];
        auto& s = fs.start[name];
        c.resize(T);
        s.resize(T);
        for (int t = 0; t < T; ++t) {
            c[t] = std::round(x[b.commit(name, t)]);
            s[t] = std::round(x[b.startup(name, t)]);
        }
    };
    for (const auto& u : sc.dispatchable) grab(u.name);
    for (const auto& u : sc.csp) grab(u.name);
    for (const auto& u : sc.flexible_demand) {
        int best = 0;
        double bv = -1.0;
        for (int m = 0; m < (int)u.profiles.size(); ++m)
            if (x[b.profile_var(u.name, m)] > bv) { bv = x[b.profile_var(u.name, m)]; best = m; }
        fs.profile[u.name] = best;
    }
    return fs;
}

/// Recourse model at fixed first stage: second-stage dispatch maximizing
/// -cost with soft balance. Uncertain rows carry a registry entry so the rhs
/// can be re-pointed per realization without rebuilding.
struct RecourseModel {
    MilpInstance milp;
    std::vector<UncertainRowRef> uncertain;
    std::vector<int> slacks;
    double const_cost = 0.0; // none today; kept for symmetry
};

inline RecourseModel make_recourse(const ScenarioData& sc, const FirstStage& fs, double penalty,
                                   double eps = 1e-7) {
    RecourseModel rm;
    MilpInstance& m = rm.milp;
    m.name = "recourse";
    const int T = sc.grid.periods;
    const double dt = sc.grid.step_hours, tr = sc.reserve.activation_minutes;

    std::vector<std::vector<std::pair<int, double>>> bal_up(T), bal_dn(T), bal_no(T);

    for (const auto& un : sc.dispatchable) {
        for (int t = 0; t < T; ++t) {
            const int p = m.add_var(names::t("p_" + un.name, t, 0), 0.0, un.p_max, VarKind::Continuous,
                                    -un.cost * dt);
            const int ru = m.add_var(names::t("ru_" + un.name, t, 0), 0.0, tr * un.ramp_up);
            const int rd = m.add_var(names::t("rd_" + un.name, t, 0), 0.0, tr * un.ramp_down);
            const double uc = fs.commit.at(un.name)[t];
            m.add_row("Eq3a", RowSense::LE, un.p_max * uc, {{p, 1.0}, {ru, 1.0}});
            m.add_row("Eq3b", RowSense::LE, -un.p_min * uc, {{p, -1.0}, {rd, 1.0}});
            bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
            bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
            bal_no[t].emplace_back(p, 1.0);
        }
    }
    for (const auto& un : sc.non_dispatchable) {
        for (int t = 0; t < T; ++t) {
            const double hi = un.band.upper[t], lo = un.band.lower[t];
            const int p = m.add_var(names::t("p_" + un.name, t, 0), 0.0, hi, VarKind::Continuous,
                                    -un.cost * dt);
            const int ru = m.add_var(names::t("ru_" + un.name, t, 0), 0.0, tr * un.ramp_up);
            const int rd = m.add_var(names::t("rd_" + un.name, t, 0), 0.0, tr * un.ramp_down);
            const int row = m.add_row("Eq4a", RowSense::LE, hi, {{p, 1.0}, {ru, 1.0}});
            rm.uncertain.push_back({row, {FamilyId::Ndrs, un.name, 0}, t, hi, -(hi - lo)});
            m.add_row("Eq4b", RowSense::LE, -un.p_min, {{p, -1.0}, {rd, 1.0}});
            bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
            bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
            bal_no[t].emplace_back(p, 1.0);
        }
    }
    for (const auto& un : sc.csp) {
        std::vector<int> ets_prev;
        for (int t = 0; t < T; ++t) {
            const double hi = un.sf_band.upper[t], lo = un.sf_band.lower[t];
            const double uc = fs.commit.at(un.name)[t], vs = fs.start.at(un.name)[t];
            const int p = m.add_var(names::t("p_" + un.name, t, 0), 0.0, un.p_max, VarKind::Continuous,
                                    -un.cost * dt);
            const int ru = m.add_var(names::t("ru_" + un.name, t, 0), 0.0, tr * un.ramp_up);
            const int rd = m.add_var(names::t("rd_" + un.name, t, 0), 0.0, tr * un.ramp_down);
            const int sf = m.add_var(names::t("sf_" + un.name, t, 0), 0.0, hi);
            const int tc = m.add_var(names::t("tc_" + un.name, t, 0), 0.0, un.charge_cap(),
                                     VarKind::Continuous, -eps);
            const int td = m.add_var(names::t("td_" + un.name, t, 0), 0.0, un.discharge_cap());
            const int es = m.add_var(names::t("es_" + un.name, t, 0), un.ts_energy_min, un.ts_energy_max);
            const int sf_row = m.add_row("Eq5a", RowSense::LE, hi, {{sf, 1.0}});
            rm.uncertain.push_back({sf_row, {FamilyId::CspThermal, un.name, 0}, t, hi, -(hi - lo)});
            m.add_row("Eq5b", RowSense::EQ, -un.startup_loss * un.p_max * vs,
                      {{p, 1.0 / un.turbine_eff}, {sf, -1.0}, {td, -1.0}, {tc, 1.0}});
            m.add_row("Eq5c", RowSense::LE, un.p_max * uc, {{p, 1.0}, {ru, 1.0}});
            m.add_row("Eq5d", RowSense::LE, -un.p_min * uc, {{p, -1.0}, {rd, 1.0}});
            if (t == 0)
                m.add_row("Eq5e", RowSense::EQ, un.ts_initial,
                          {{es, 1.0}, {tc, -un.ts_charge_eff * dt}, {td, dt / un.ts_discharge_eff}});
            else
                m.add_row("Eq5e", RowSense::EQ, 0.0,
                          {{es, 1.0}, {ets_prev[t - 1], -1.0}, {tc, -un.ts_charge_eff * dt},
                           {td, dt / un.ts_discharge_eff}});
            ets_prev.push_back(es);
            bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
            bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
            bal_no[t].emplace_back(p, 1.0);
        }
    }
    for (const auto& un : sc.flexible_demand) {
        const int chosen = fs.profile.at(un.name);
        std::vector<int> pvars;
        for (int t = 0; t < T; ++t) {
            const double lo = un.profile_lower(chosen, t), hi = un.profile_upper(chosen, t);
            const int p = m.add_var(names::t("p_" + un.name, t, 0), 0.0, un.p_max);
            const int ru = m.add_var(names::t("ru_" + un.name, t, 0), 0.0, tr * un.ramp_up);
            const int rd = m.add_var(names::t("rd_" + un.name, t, 0), 0.0, tr * un.ramp_down);
            pvars.push_back(p);
            const int row = m.add_row("Eq6a", RowSense::LE, -lo, {{p, -1.0}});
            rm.uncertain.push_back({row, {FamilyId::FdConsumption, un.name, 0}, t, -lo, -(hi - lo)});
            m.add_row("Eq6c", RowSense::LE, -un.p_min, {{p, -1.0}, {ru, 1.0}});
            m.add_row("Eq6d", RowSense::LE, un.p_max, {{p, 1.0}, {rd, 1.0}});
            bal_up[t].emplace_back(p, -1.0); bal_up[t].emplace_back(ru, 1.0);
            bal_dn[t].emplace_back(p, -1.0); bal_dn[t].emplace_back(rd, -1.0);
            bal_no[t].emplace_back(p, -1.0);
        }
        if (un.daily_energy_min) {
            std::vector<std::pair<int, double>> row;
            for (int t = 0; t < T; ++t) row.emplace_back(pvars[t], -dt);
            m.add_row("FdEnergy", RowSense::LE, -*un.daily_energy_min, std::move(row));
        }
    }
    for (int t = 0; t < T; ++t) {
        auto finish = [&](const char* tag, const char* ab, std::vector<std::pair<int, double>> row,
                          double rhs) {
            const int sp = m.add_var(names::t(std::string("slp") + ab, t, 0), 0.0, kInf,
                                     VarKind::Continuous, -penalty);
            const int sm = m.add_var(names::t(std::string("slm") + ab, t, 0), 0.0, kInf,
                                     VarKind::Continuous, -penalty);
            row.emplace_back(sp, 1.0);
            row.emplace_back(sm, -1.0);
            rm.slacks.push_back(sp);
            rm.slacks.push_back(sm);
            m.add_row(tag, RowSense::EQ, rhs, std::move(row));
        };
        finish("Eq2-up", "u", bal_up[t], fs.pe[t] + fs.rvup[t]);
        finish("Eq2-down", "d", bal_dn[t], fs.pe[t] - fs.rvdn[t]);
        finish("Eq2-none", "n", bal_no[t], fs.pe[t]);
    }
    return rm;
}

inline void apply_realization_rhs(const RecourseModel& rm, const Realization& xi, SimplexLp& lp) {
    for (const auto& ur : rm.uncertain) {
        double d = 0.0;
        if (auto it = xi.delta.find(ur.family); it != xi.delta.end()) d = it->second[ur.t];
        lp.set_row_rhs(ur.row, ur.base_rhs + ur.shift * d);
    }
}

// ---------------------------------------------------------------------------
// adversary subproblem

struct AdversaryResult {
    Realization xi;
    double recourse_value = 0.0;  // audited max-dispatch value at xi (-cost)
    double value_bound_lo = -kInf; // certified lower bound on min over all xi
    bool exact = false;
    std::optional<Realization> runner_up; // second candidate worth enumerating
};

namespace detail {

/// Quantity families present in a budget set, in deterministic order.
inline std::vector<std::pair<FamilyId, int>> quantity_families(const BudgetSet& budgets, int T) {
    std::vector<std::pair<FamilyId, int>> fams;
    for (const auto& [f, g] : budgets.gamma) {
        if (f.kind != FamilyId::Ndrs && f.kind != FamilyId::CspThermal &&
            f.kind != FamilyId::FdConsumption)
            continue;
        if (g > 0) fams.emplace_back(f, std::min(g, T));
    }
    return fams;
}

/// Greedy warm start: rank single-period deviations by marginal damage at the
/// nominal point, take the Gamma worst per family.
inline Realization greedy_adversary(const RecourseModel& rm, SimplexLp& lp,
                                    const std::vector<std::pair<FamilyId, int>>& fams, int T) {
    Realization zero;
    apply_realization_rhs(rm, zero, lp);
    if (lp.solve() != LpStatus::Optimal)
        throw NumericalBreakdown("recourse LP infeasible at the nominal point");
    const double v0 = lp.objective();
    Realization xi;
    for (const auto& [f, g] : fams) xi.delta[f].assign(T, 0.0);
    std::vector<std::tuple<double, int, int>> damage; // (value drop, family idx, t)
    for (int fi = 0; fi < (int)fams.size(); ++fi) {
        for (const auto& ur : rm.uncertain) {
            if (!(ur.family == fams[fi].first)) continue;
            if (ur.shift == 0.0) continue;
            lp.set_row_rhs(ur.row, ur.base_rhs + ur.shift);
            if (lp.solve() == LpStatus::Optimal)
                damage.emplace_back(v0 - lp.objective(), fi, ur.t);
            lp.set_row_rhs(ur.row, ur.base_rhs);
        }
    }
    std::sort(damage.begin(), damage.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<2>(a) < std::get<2>(b);
    });
    std::vector<int> left;
    for (const auto& [f, g] : fams) left.push_back(g);
    for (const auto& [dmg, fi, t] : damage) {
        (void)dmg;
        if (left[fi] <= 0) continue;
        xi.delta[fams[fi].first][t] = 1.0;
        --left[fi];
    }
    // saturate leftover budget deterministically (adverse moves never help us)
    for (int fi = 0; fi < (int)fams.size(); ++fi)
        for (int t = 0; t < T && left[fi] > 0; ++t)
            if (xi.delta[fams[fi].first][t] == 0.0) { xi.delta[fams[fi].first][t] = 1.0; --left[fi]; }
    return xi;
}

inline double audit_recourse(const RecourseModel& rm, SimplexLp& lp, const Realization& xi) {
    apply_realization_rhs(rm, xi, lp);
    if (lp.solve() != LpStatus::Optimal)
        throw NumericalBreakdown("recourse LP did not solve at audited realization");
    return lp.objective();
}

/// Exhaustive minimization over budget vertices (saturated deviations).
inline AdversaryResult enumerate_adversary(const RecourseModel& rm,
                                           const std::vector<std::pair<FamilyId, int>>& fams,
                                           int T) {
    double combos = 1.0;
    auto choose = [](int n, int k) {
        double c = 1.0;
        for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
        return c;
    };
    for (const auto& [f, g] : fams) combos *= choose(T, g);
    if (combos > 1e6)
        throw EnumerationTooLarge("budget vertex count " + std::to_string(combos) + " exceeds 1e6");

    SimplexLp lp(rm.milp);
    AdversaryResult best;
    best.exact = true;
    best.recourse_value = kInf;

    // per-family subset iterators (combinations in lexicographic order)
    const int F = (int)fams.size();
    std::vector<std::vector<int>> pick(F);
    for (int f = 0; f < F; ++f) {
        pick[f].resize(fams[f].second);
        for (int i = 0; i < fams[f].second; ++i) pick[f][i] = i;
    }
    auto advance = [&](int f) {
        auto& p = pick[f];
        const int k = (int)p.size();
        int i = k - 1;
        while (i >= 0 && p[i] == T - k + i) --i;
        if (i < 0) return false;
        ++p[i];
        for (int j = i + 1; j < k; ++j) p[j] = p[j - 1] + 1;
        return true;
    };
    std::function<bool()> next = [&]() {
        for (int f = F - 1; f >= 0; --f) {
            if (advance(f)) return true;
            auto& p = pick[f];
            for (int i = 0; i < (int)p.size(); ++i) p[i] = i;
        }
        return false;
    };

    bool more = true;
    while (more) {
        Realization xi;
        for (int f = 0; f < F; ++f) {
            auto& d = xi.delta[fams[f].first];
            d.assign(T, 0.0);
            for (int t : pick[f]) d[t] = 1.0;
        }
        apply_realization_rhs(rm, xi, lp);
        if (lp.solve() != LpStatus::Optimal)
            throw NumericalBreakdown("recourse LP failed during enumeration");
        const double v = lp.objective();
        if (v < best.recourse_value - 1e-12) {
            best.recourse_value = v;
            best.xi = xi;
        }
        if (F == 0) break;
        more = next();
    }
    if (F == 0) {
        Realization zero;
        apply_realization_rhs(rm, zero, lp);
        lp.solve();
        best.recourse_value = lp.objective();
        best.xi = zero;
    }
    best.value_bound_lo = best.recourse_value;
    return best;
}

/// Single-MILP adversary: LP dual of the recourse with per-row big-M
/// linearization of the delta-dual products. The returned candidate is always
/// audited by a direct recourse solve; a disagreement beyond tolerance means
/// some big-M clipped an active dual and raises GapNotClosed.
inline AdversaryResult dual_bigm_adversary(const ScenarioData& sc, const RecourseModel& rm,
                                           const std::vector<std::pair<FamilyId, int>>& fams, int T,
                                           double penalty, const SolveOptions& sopt,
                                           double gap_rel, const Realization* hint = nullptr) {
    const MilpInstance& P = rm.milp;

    // shifted-variable dual: rows' duals pi (LE -> >=0, EQ -> free), finite
    // upper bounds' duals sigma >= 0, dual rows one per primal variable.
    MilpInstance D;
    D.name = "adversary_dual";
    double cmax = 0.0;
    for (int j = 0; j < P.num_vars(); ++j) cmax = std::max(cmax, std::abs(P.var(j).obj));

    for (int j = 0; j < P.num_vars(); ++j)
        if (!std::isfinite(P.var(j).lb))
            throw NumericalBreakdown("recourse variable without finite lower bound: " +
                                     P.var(j).name);

    std::vector<int> pi(P.num_rows());
    for (int i = 0; i < P.num_rows(); ++i) {
        const bool eq = P.row(i).sense == RowSense::EQ;
        pi[i] = D.add_var("pi_" + std::to_string(i), eq ? -kInf : 0.0, kInf);
    }
    // family/period -> delta variable (binary), fixed families folded
    std::map<FamilyId, std::vector<int>> delta;
    for (const auto& [f, g] : fams) {
        auto& dv = delta[f];
        dv.assign(T, -1);
        if (g >= T) continue; // saturated: fold below
        std::vector<std::pair<int, double>> budget_row;
        for (int t = 0; t < T; ++t) {
            dv[t] = D.add_var("delta_" + mps_sanitize(f.str()) + "_t" + std::to_string(t), 0.0, 1.0,
                              VarKind::Binary);
            budget_row.emplace_back(dv[t], 1.0);
        }
        D.add_row("Budget", RowSense::LE, (double)g, std::move(budget_row));
    }

    // objective (maximize the negated dual objective)
    // dual objective: sum_i b'_i pi_i + sum_j (u-l)_j sigma_j + sum_unc shift*w
    std::vector<double> shift_of_row(P.num_rows(), 0.0);
    std::vector<const UncertainRowRef*> unc_of_row(P.num_rows(), nullptr);
    for (const auto& ur : rm.uncertain) {
        shift_of_row[ur.row] = ur.shift;
        unc_of_row[ur.row] = &ur;
    }

    // b' = rhs - R*l with l the variable lower bounds
    std::vector<double> bprime(P.num_rows());
    for (int i = 0; i < P.num_rows(); ++i) {
        double b = unc_of_row[i] ? unc_of_row[i]->base_rhs : P.row(i).rhs;
        for (const auto& [j, c] : P.row(i).coeffs) b -= c * P.var(j).lb;
        bprime[i] = b;
    }

    double obj_const = 0.0; // c^T l from the shift, added back to the value
    for (int j = 0; j < P.num_vars(); ++j) obj_const += P.var(j).obj * P.var(j).lb;

    for (int i = 0; i < P.num_rows(); ++i) {
        double coeff = bprime[i];
        const auto* ur = unc_of_row[i];
        if (ur) {
            const auto& dv = delta.at(ur->family);
            if (dv[ur->t] < 0) coeff += ur->shift; // saturated family: delta = 1
        }
        if (coeff != 0.0) D.add_obj(pi[i], -coeff);
    }

    // per-row big-M: slack penalties reachable through the row's variables
    // plus their cost coefficients, with headroom
    auto row_bigm = [&](int i) {
        double m = 1.0;
        for (const auto& [j, c] : P.row(i).coeffs) {
            (void)c;
            m += std::abs(P.var(j).obj);
        }
        return m + 6.0 * penalty;
    };

    std::vector<std::vector<std::pair<int, double>>> dual_row(P.num_vars());
    for (int i = 0; i < P.num_rows(); ++i)
        for (const auto& [j, c] : P.row(i).coeffs) dual_row[j].emplace_back(pi[i], c);

    for (int j = 0; j < P.num_vars(); ++j) {
        const auto& v = P.var(j);
        if (v.ub <= v.lb) continue; // fixed variable: no dual constraint
        if (std::isfinite(v.ub)) {
            const int sg = D.add_var("sg_" + std::to_string(j), 0.0, kInf);
            dual_row[j].emplace_back(sg, 1.0);
            D.add_obj(sg, -(v.ub - v.lb));
        }
        // sum_i R_ij pi_i + sigma_j >= c_j
        D.add_row("DualFeas", RowSense::GE, v.obj, std::move(dual_row[j]));
    }

    // linearized products for non-saturated uncertain rows
    for (const auto& ur : rm.uncertain) {
        const auto it = delta.find(ur.family);
        if (it == delta.end()) continue; // family without budget
        const int dv = it->second[ur.t];
        if (dv < 0) continue; // saturated, folded into pi coefficient
        const int w = D.add_var("w_" + std::to_string(ur.row), 0.0, kInf);
        D.add_obj(w, -ur.shift); // dual objective has shift*w; shift <= 0
        const double M = row_bigm(ur.row);
        D.add_row("WLinkM", RowSense::LE, 0.0, {{w, 1.0}, {dv, -M}});
        D.add_row("WLinkPi", RowSense::LE, 0.0, {{w, 1.0}, {pi[ur.row], -1.0}});
    }

    SolveOptions dopt = sopt;
    dopt.mip_gap_rel = std::max(gap_rel, 1e-9);
    dopt.start_hint.clear();
    if (hint)
        for (const auto& [f, dv] : delta) {
            auto it = hint->delta.find(f);
            if (it == hint->delta.end()) continue;
            for (int t = 0; t < T; ++t)
                if (dv[t] >= 0)
                    dopt.start_hint.emplace_back(dv[t], (int8_t)(it->second[t] > 0.5 ? 1 : 0));
        }
    Solution dsol = solve(D, dopt);
    if (!dsol.feasible())
        throw NumericalBreakdown("adversary dual MILP " + std::string(to_string(dsol.status)));

    // read delta, audit by direct recourse solve
    AdversaryResult res;
    for (const auto& [f, g] : fams) {
        auto& d = res.xi.delta[f];
        d.assign(T, 0.0);
        const auto& dv = delta.at(f);
        for (int t = 0; t < T; ++t)
            d[t] = dv[t] < 0 ? 1.0 : std::round(dsol.values[dv[t]]);
    }
    SimplexLp lp(P);
    res.recourse_value = audit_recourse(rm, lp, res.xi);
    const double claim = -(dsol.objective) + obj_const; // dual value at the MILP optimum
    const double scale = std::max({1.0, std::abs(claim), std::abs(res.recourse_value)});
    if (std::abs(claim - res.recourse_value) > 1e-5 * scale)
        throw GapNotClosed("adversary duality audit failed: dual claims " + std::to_string(claim) +
                           " but direct recourse gives " + std::to_string(res.recourse_value) +
                           " at the returned realization (big-M too small)");
    // best proven bound on the min: MILP upper bound on max(-dual) negated
    res.value_bound_lo = -(dsol.bound) + obj_const;
    res.exact = dsol.status == SolveStatus::Optimal;
    return res;
}

} // namespace detail

/// Worst-case realization of the quantity families for a fixed first stage.
inline AdversaryResult adversary_subproblem(const ScenarioData& sc, const FirstStage& fs,
                                            const BudgetSet& budgets, const RobustOptions& ropt,
                                            const SolveOptions& sopt) {
    const int T = sc.grid.periods;
    const double penalty =
        ropt.slack_penalty > 0.0 ? ropt.slack_penalty : default_slack_penalty(sc);
    RecourseModel rm = make_recourse(sc, fs, penalty);
    auto fams = detail::quantity_families(budgets, T);

    if (fams.empty()) {
        SimplexLp lp(rm.milp);
        AdversaryResult res;
        res.recourse_value = detail::audit_recourse(rm, lp, {});
        res.value_bound_lo = res.recourse_value;
        res.exact = true;
        return res;
    }
    if (ropt.adversary_mode == "enumerate") return detail::enumerate_adversary(rm, fams, T);

    // greedy incumbent first; the MILP then proves or improves it
    SimplexLp lp(rm.milp);
    Realization greedy = detail::greedy_adversary(rm, lp, fams, T);
    const double greedy_val = detail::audit_recourse(rm, lp, greedy);
    AdversaryResult milp_res =
        detail::dual_bigm_adversary(sc, rm, fams, T, penalty, sopt, ropt.eps_rel / 4, &greedy);
    if (greedy_val < milp_res.recourse_value) {
        milp_res.runner_up = milp_res.xi;
        milp_res.xi = greedy;
        milp_res.recourse_value = greedy_val;
    } else if (!(greedy.delta == milp_res.xi.delta)) {
        milp_res.runner_up = greedy;
    }
    milp_res.value_bound_lo = std::min(milp_res.value_bound_lo, milp_res.recourse_value);
    return milp_res;
}

// ---------------------------------------------------------------------------
// column-and-constraint generation

struct IterationRecord {
    int iter = 0;
    double upper = 0.0, lower = 0.0, gap = 0.0;
    std::string realization_summary;
};

struct RobustSolution {
    enum class Status { Converged, IterationLimit, MasterInfeasible };
    Status status = Status::Converged;
    FirstStage first_stage;
    Schedule nominal_schedule; // dispatch of the nominal copy at the final master
    double worst_profit = -kInf; // certified lower bound
    double master_objective = -kInf;
    double gap = kInf;
    double slack_total = 0.0; // balance slack across all copies at the optimum
    std::vector<Realization> realizations;
    std::vector<IterationRecord> trace;
};

inline std::string summarize_realization(const Realization& xi) {
    std::ostringstream os;
    bool first_f = true;
    for (const auto& [f, d] : xi.delta) {
        double s = 0.0;
        for (double v : d) s += v;
        if (s <= 0.0) continue;
        if (!first_f) os << ";";
        first_f = false;
        os << f.str() << "@";
        bool first_t = true;
        for (int t = 0; t < (int)d.size(); ++t)
            if (d[t] > 0.5) {
                if (!first_t) os << ",";
                first_t = false;
                os << t;
            }
    }
    return first_f ? "nominal" : os.str();
}

/// Robust session solve: master with one dispatch copy per enumerated
/// realization, price protection on the first-stage positions, adversary
/// oracle closing the loop.
inline RobustSolution ccg_solve(const ScenarioData& sc, const SessionSpec& sess,
                                const RobustOptions& ropt = {}, const SolveOptions& sopt = {},
                                const Fixings& fixings = {},
                                const std::vector<double>* prior_energy = nullptr) {
    const double penalty =
        ropt.slack_penalty > 0.0 ? ropt.slack_penalty : default_slack_penalty(sc);
    RobustSolution out;
    std::vector<Realization> enumerated{Realization{}}; // nominal copy seeds the master

    double best_lb = -kInf;
    double ub = kInf;
    bool any_budget = false;
    for (const auto& [f, g] : sess.budgets.gamma)
        if (g > 0) any_budget = true;
    SolveOptions master_opt = sopt;
    if (any_budget) master_opt.mip_gap_rel = std::max(sopt.mip_gap_rel, ropt.eps_rel / 8);
    std::vector<std::pair<int, int8_t>> master_hint;

    // the master grows in place: first stage and fixings once, then one
    // dispatch copy per enumerated realization
    BuildOptions bo;
    bo.soft_balance = true;
    bo.slack_penalty = penalty;
    bo.with_eta = true;
    bo.prior_energy = prior_energy;
    SessionModelBuilder b(sc, sess, bo);
    protect_session_prices(b, sc, sess);
    b.add_scenario_copy(enumerated.front());
    apply_fixings(b.milp(), fixings);

    for (int iter = 1; iter <= ropt.max_iters; ++iter) {
        master_opt.start_hint = master_hint;
        Solution msol = solve(b.milp(), master_opt);
        if (msol.status == SolveStatus::Infeasible)
            throw MasterInfeasible("CCG master infeasible at iteration " + std::to_string(iter));
        if (!msol.feasible())
            throw NumericalBreakdown("CCG master " + std::string(to_string(msol.status)));
        ub = std::min(ub, msol.bound); // proven master bound, monotone

        // first-stage binaries warm-start the next master (indices are stable
        // because the first stage is built before the scenario copies)
        master_hint.clear();
        for (int j : b.milp().binaries())
            master_hint.emplace_back(j, (int8_t)(msol.values[j] > 0.5 ? 1 : 0));

        FirstStage fs = extract_first_stage(b, sc, msol.values);
        AdversaryResult adv = adversary_subproblem(sc, fs, sess.budgets, ropt, sopt);
        const double revenue = b.revenue_value(msol.values);
        const double lb_cand = revenue + adv.recourse_value;
        const double lb_cert = revenue + adv.value_bound_lo;

        if (lb_cert > best_lb) {
            best_lb = lb_cert;
            out.first_stage = fs;
            out.worst_profit = best_lb;
            double slack = 0.0;
            for (int k = 0; k < b.num_copies(); ++k)
                for (int sv : b.slack_vars(k)) slack += std::abs(msol.values[sv]);
            out.slack_total = slack;
            out.nominal_schedule = extract_schedule(b, sc, msol.values, msol.objective, 0);
        }
        out.master_objective = ub;
        const double gap = (ub - best_lb) / std::max(1.0, std::abs(ub));
        out.gap = gap;
        IterationRecord rec;
        rec.iter = iter;
        rec.upper = ub;
        rec.lower = best_lb;
        rec.gap = gap;
        rec.realization_summary = summarize_realization(adv.xi);
        out.trace.push_back(rec);

        if (gap <= ropt.eps_rel) {
            out.status = RobustSolution::Status::Converged;
            return out;
        }
        // grow the master; a stalled duplicate realization cannot improve it
        auto is_new = [&](const Realization& xi) {
            for (const auto& e : enumerated)
                if (e.delta == xi.delta) return false;
            return true;
        };
        bool grew = false;
        if (is_new(adv.xi)) {
            enumerated.push_back(adv.xi);
            b.add_scenario_copy(adv.xi);
            grew = true;
        }
        if (adv.runner_up && is_new(*adv.runner_up)) {
            enumerated.push_back(*adv.runner_up);
            b.add_scenario_copy(*adv.runner_up);
            grew = true;
        }
        if (!grew) {
            out.status = RobustSolution::Status::IterationLimit;
            return out;
        }
        out.realizations = {enumerated.begin() + 1, enumerated.end()};
        (void)lb_cand;
    }
    out.status = RobustSolution::Status::IterationLimit;
    return out;
}

} // namespace rvpp
