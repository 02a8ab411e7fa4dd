#pragma once

// Translates a ScenarioData + SessionSpec into a MILP over the schedule
// variables. The same builder serves three callers:
//   - deterministic session solves (one scenario copy, hard balance),
//   - CCG masters (first-stage vars shared across per-realization copies of
//     the dispatch block, objective max eta with one linking row per copy),
//   - fixed-first-stage recourse models (no first-stage variables at all,
//     soft balance, cost-only objective) built by make_recourse below.
//
// First stage: market positions (energy split into sell/buy plus a net
// variable so cleared results can be pinned by name), reserve positions,
// commitment and startup status, and the flexible-demand profile choice.
// Second stage (per copy): unit dispatch, unit reserves, CSP internals and
// flexible-demand consumption.
//
// Single-variable limits (reserve ramp caps, solar-field nonnegativity, TS
// power caps) are applied as variable bounds; uncertain limits are rows so a
// realization can move their rhs.

#include "core.hpp"
#include "milp.hpp"

#include <functional>
#include <memory>
#include <sstream>

namespace rvpp {

struct BalanceViolation : std::runtime_error {
    explicit BalanceViolation(const std::string& w) : std::runtime_error(w) {}
};

struct BuildOptions {
    bool soft_balance = false;   // add penalized slack to the balance rows
    double slack_penalty = 0.0;  // EUR/MWh on balance slack
    bool with_eta = false;       // CCG master form: max eta, one row per copy
    double tie_break_eps = 1e-7; // lexicographic churn penalty
    const std::vector<double>* prior_energy = nullptr; // cleared net position, for IDM increments
};

/// Registry entry for a row whose rhs depends on one family's deviation:
/// rhs(delta) = base_rhs + shift * delta_{family,t} with shift <= 0.
struct UncertainRowRef {
    int row = -1;
    FamilyId family;
    int t = 0;
    double base_rhs = 0.0;
    double shift = 0.0;
};

namespace names {
inline std::string t(const std::string& stem, int t, int copy) {
    return copy == 0 ? stem + "_t" + std::to_string(t)
                     : stem + "_t" + std::to_string(t) + "_k" + std::to_string(copy);
}
} // namespace names

class SessionModelBuilder {
public:
    SessionModelBuilder(const ScenarioData& sc, const SessionSpec& sess, BuildOptions opts = {})
        : sc_(sc), sess_(sess), opts_(opts), T_(sc.grid.periods), dt_(sc.grid.step_hours) {
        milp_.name = sess.label();
        tr_ = sc.reserve.activation_minutes;
        double cap = 0.0;
        for (const auto& u : sc_.dispatchable) cap += u.p_max;
        for (const auto& u : sc_.non_dispatchable) cap += u.p_max();
        for (const auto& u : sc_.csp) cap += u.p_max;
        for (const auto& u : sc_.flexible_demand) cap += u.p_max;
        cap_total_ = std::max(cap, 1.0);
        build_first_stage();
    }

    MilpInstance& milp() { return milp_; }
    const MilpInstance& milp() const { return milp_; }
    int num_copies() const { return (int)copies_.size(); }
    const std::vector<UncertainRowRef>& uncertain_rows(int copy) const {
        return copies_[copy].uncertain;
    }

    // first-stage accessors
    int pe(int t) const { return pe_[t]; }
    int sell(int t) const { return sell_[t]; }
    int buy(int t) const { return buy_[t]; }
    int rvup(int t) const { return rvup_[t]; }
    int rvdn(int t) const { return rvdn_[t]; }
    int inc_pos(int t) const { return incp_.empty() ? -1 : incp_[t - w0_]; }
    int inc_neg(int t) const { return incm_.empty() ? -1 : incm_[t - w0_]; }
    int commit(const std::string& unit, int t) const { return u_.at(unit)[t]; }
    bool has_commit(const std::string& unit) const { return u_.count(unit) > 0; }
    int startup(const std::string& unit, int t) const { return v_.at(unit)[t]; }
    int profile_var(const std::string& unit, int m) const { return prof_.at(unit)[m]; }
    int eta() const { return eta_; }
    int window_first() const { return w0_; }
    int window_last() const { return w1_; }

    // per-copy dispatch accessors
    struct UnitVars {
        std::vector<int> p, rup, rdn;
        std::vector<int> sf, tsc, tsd, ets; // CSP only
    };
    const UnitVars& unit_vars(int copy, const std::string& unit) const {
        return copies_[copy].units.at(unit);
    }
    const std::vector<int>& slack_vars(int copy) const { return copies_[copy].slacks; }

    const std::vector<std::pair<int, double>>& revenue_expr() const { return revenue_expr_; }

    /// Extends the first-stage revenue expression (price protection terms).
    /// Must be called before the first scenario copy when eta rows are used.
    void add_revenue_term(int var, double coeff) {
        if (!copies_.empty())
            throw std::logic_error("revenue terms must precede scenario copies");
        revenue_expr_.emplace_back(var, coeff);
        if (!opts_.with_eta) milp_.add_obj(var, coeff);
    }

    /// Linear revenue part evaluated at fixed first-stage values.
    double revenue_value(const std::vector<double>& x) const {
        double v = 0.0;
        for (const auto& [j, c] : revenue_expr_) v += c * x[j];
        return v;
    }

    /// Adds one dispatch block under the given realization; returns its index.
    int add_scenario_copy(const Realization& xi) {
        const int k = (int)copies_.size();
        copies_.emplace_back();
        Copy& cp = copies_.back();
        std::vector<std::pair<int, double>> cost; // positive coefficients = cost

        // per-period balance accumulation: gen - demand, per activation case
        std::vector<std::vector<std::pair<int, double>>> bal_up(T_), bal_dn(T_), bal_no(T_);

        auto reserve_bounds = [&](double ramp_up, double ramp_down) {
            return std::pair<double, double>{tr_ * ramp_up, tr_ * ramp_down};
        };

        for (const auto& un : sc_.dispatchable) {
            UnitVars uv;
            const auto [cap_up, cap_dn] = reserve_bounds(un.ramp_up, un.ramp_down);
            for (int t = 0; t < T_; ++t) {
                const int p = milp_.add_var(names::t("p_" + un.name, t, k), 0.0, un.p_max);
                const int ru = milp_.add_var(names::t("ru_" + un.name, t, k), 0.0, cap_up);
                const int rd = milp_.add_var(names::t("rd_" + un.name, t, k), 0.0, cap_dn);
                uv.p.push_back(p); uv.rup.push_back(ru); uv.rdn.push_back(rd);
                const int uc = u_.at(un.name)[t];
                milp_.add_row("Eq3a", RowSense::LE, 0.0, {{p, 1.0}, {ru, 1.0}, {uc, -un.p_max}});
                milp_.add_row("Eq3b", RowSense::LE, 0.0, {{uc, un.p_min}, {p, -1.0}, {rd, 1.0}});
                cost.emplace_back(p, un.cost * dt_);
                bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
                bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
                bal_no[t].emplace_back(p, 1.0);
            }
            cp.units.emplace(un.name, std::move(uv));
        }

        for (const auto& un : sc_.non_dispatchable) {
            UnitVars uv;
            const auto [cap_up, cap_dn] = reserve_bounds(un.ramp_up, un.ramp_down);
            const std::vector<double>* del = family_delta(xi, {FamilyId::Ndrs, un.name, 0});
            for (int t = 0; t < T_; ++t) {
                const double hi = un.band.upper[t], lo = un.band.lower[t];
                const double d = del ? (*del)[t] : 0.0;
                const int p = milp_.add_var(names::t("p_" + un.name, t, k), 0.0, hi);
                const int ru = milp_.add_var(names::t("ru_" + un.name, t, k), 0.0, cap_up);
                const int rd = milp_.add_var(names::t("rd_" + un.name, t, k), 0.0, cap_dn);
                uv.p.push_back(p); uv.rup.push_back(ru); uv.rdn.push_back(rd);
                const int cap_row = milp_.add_row("Eq4a", RowSense::LE, hi - d * (hi - lo),
                                                  {{p, 1.0}, {ru, 1.0}});
                cp.uncertain.push_back({cap_row, {FamilyId::Ndrs, un.name, 0}, t, hi, -(hi - lo)});
                milp_.add_row("Eq4b", RowSense::LE, -un.p_min, {{p, -1.0}, {rd, 1.0}});
                cost.emplace_back(p, un.cost * dt_);
                bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
                bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
                bal_no[t].emplace_back(p, 1.0);
            }
            cp.units.emplace(un.name, std::move(uv));
        }

        for (const auto& un : sc_.csp) {
            UnitVars uv;
            const auto [cap_up, cap_dn] = reserve_bounds(un.ramp_up, un.ramp_down);
            const std::vector<double>* del = family_delta(xi, {FamilyId::CspThermal, un.name, 0});
            const double chg = un.charge_cap(), dis = un.discharge_cap();
            for (int t = 0; t < T_; ++t) {
                const double hi = un.sf_band.upper[t], lo = un.sf_band.lower[t];
                const double d = del ? (*del)[t] : 0.0;
                const int p = milp_.add_var(names::t("p_" + un.name, t, k), 0.0, un.p_max);
                const int ru = milp_.add_var(names::t("ru_" + un.name, t, k), 0.0, cap_up);
                const int rd = milp_.add_var(names::t("rd_" + un.name, t, k), 0.0, cap_dn);
                const int sf = milp_.add_var(names::t("sf_" + un.name, t, k), 0.0, hi);
                const int tc = milp_.add_var(names::t("tc_" + un.name, t, k), 0.0, chg);
                const int td = milp_.add_var(names::t("td_" + un.name, t, k), 0.0, dis);
                const int es = milp_.add_var(names::t("es_" + un.name, t, k),
                                             un.ts_energy_min, un.ts_energy_max);
                uv.p.push_back(p); uv.rup.push_back(ru); uv.rdn.push_back(rd);
                uv.sf.push_back(sf); uv.tsc.push_back(tc); uv.tsd.push_back(td); uv.ets.push_back(es);

                const int sf_row = milp_.add_row("Eq5a", RowSense::LE, hi - d * (hi - lo), {{sf, 1.0}});
                cp.uncertain.push_back({sf_row, {FamilyId::CspThermal, un.name, 0}, t, hi, -(hi - lo)});
                const int uc = u_.at(un.name)[t];
                const int vs = v_.at(un.name)[t];
                milp_.add_row("Eq5b", RowSense::EQ, 0.0,
                              {{p, 1.0 / un.turbine_eff}, {sf, -1.0}, {td, -1.0}, {tc, 1.0},
                               {vs, un.startup_loss * un.p_max}});
                milp_.add_row("Eq5c", RowSense::LE, 0.0, {{p, 1.0}, {ru, 1.0}, {uc, -un.p_max}});
                milp_.add_row("Eq5d", RowSense::LE, 0.0, {{uc, un.p_min}, {p, -1.0}, {rd, 1.0}});
                if (t == 0)
                    milp_.add_row("Eq5e", RowSense::EQ, un.ts_initial,
                                  {{es, 1.0}, {tc, -un.ts_charge_eff * dt_},
                                   {td, dt_ / un.ts_discharge_eff}});
                else
                    milp_.add_row("Eq5e", RowSense::EQ, 0.0,
                                  {{es, 1.0}, {uv.ets[t - 1], -1.0}, {tc, -un.ts_charge_eff * dt_},
                                   {td, dt_ / un.ts_discharge_eff}});
                cost.emplace_back(p, un.cost * dt_);
                cost.emplace_back(tc, opts_.tie_break_eps);
                bal_up[t].emplace_back(p, 1.0); bal_up[t].emplace_back(ru, 1.0);
                bal_dn[t].emplace_back(p, 1.0); bal_dn[t].emplace_back(rd, -1.0);
                bal_no[t].emplace_back(p, 1.0);
            }
            cp.units.emplace(un.name, std::move(uv));
        }

        for (const auto& un : sc_.flexible_demand) {
            UnitVars uv;
            const auto [cap_up, cap_dn] = reserve_bounds(un.ramp_up, un.ramp_down);
            const std::vector<double>* del = family_delta(xi, {FamilyId::FdConsumption, un.name, 0});
            const int M = (int)un.profiles.size();
            for (int t = 0; t < T_; ++t) {
                const double d = del ? (*del)[t] : 0.0;
                const int p = milp_.add_var(names::t("p_" + un.name, t, k), 0.0, un.p_max);
                const int ru = milp_.add_var(names::t("ru_" + un.name, t, k), 0.0, cap_up);
                const int rd = milp_.add_var(names::t("rd_" + un.name, t, k), 0.0, cap_dn);
                uv.p.push_back(p); uv.rup.push_back(ru); uv.rdn.push_back(rd);

                // p_d >= sum_m minload_m(delta) * prof_m; the deviation rides on
                // the profile coefficients here, so no rhs registry entry
                std::vector<std::pair<int, double>> row{{p, -1.0}};
                for (int m = 0; m < M; ++m) {
                    const double lo = un.profile_lower(m, t), hi = un.profile_upper(m, t);
                    row.emplace_back(prof_.at(un.name)[m], lo + d * (hi - lo));
                }
                milp_.add_row("Eq6a", RowSense::LE, 0.0, std::move(row));
                milp_.add_row("Eq6c", RowSense::LE, -un.p_min, {{p, -1.0}, {ru, 1.0}});
                milp_.add_row("Eq6d", RowSense::LE, un.p_max, {{p, 1.0}, {rd, 1.0}});
                bal_up[t].emplace_back(p, -1.0); bal_up[t].emplace_back(ru, 1.0);
                bal_dn[t].emplace_back(p, -1.0); bal_dn[t].emplace_back(rd, -1.0);
                bal_no[t].emplace_back(p, -1.0);
            }
            if (un.daily_energy_min) {
                std::vector<std::pair<int, double>> row;
                for (int t = 0; t < T_; ++t) row.emplace_back(uv.p[t], -dt_);
                milp_.add_row("FdEnergy", RowSense::LE, -*un.daily_energy_min, std::move(row));
            }
            cp.units.emplace(un.name, std::move(uv));
        }

        // supply-demand balance, one row per activation case (Eq2 family)
        for (int t = 0; t < T_; ++t) {
            auto finish = [&](const char* tag, const char* abbrev,
                              std::vector<std::pair<int, double>> row, int pos_extra,
                              double pos_coeff) {
                row.emplace_back(pe_[t], -1.0);
                if (pos_extra >= 0) row.emplace_back(pos_extra, pos_coeff);
                if (opts_.soft_balance) {
                    const int sp = milp_.add_var(names::t(std::string("slp") + abbrev, t, k), 0.0, kInf);
                    const int sm = milp_.add_var(names::t(std::string("slm") + abbrev, t, k), 0.0, kInf);
                    row.emplace_back(sp, 1.0);
                    row.emplace_back(sm, -1.0);
                    cost.emplace_back(sp, opts_.slack_penalty);
                    cost.emplace_back(sm, opts_.slack_penalty);
                    cp.slacks.push_back(sp);
                    cp.slacks.push_back(sm);
                }
                milp_.add_row(tag, RowSense::EQ, 0.0, std::move(row));
            };
            finish("Eq2-up", "u", bal_up[t], rvup_[t], -1.0);
            finish("Eq2-down", "d", bal_dn[t], rvdn_[t], 1.0);
            finish("Eq2-none", "n", bal_no[t], -1, 0.0);
        }

        cp.cost_expr = std::move(cost);

        if (opts_.with_eta) {
            // eta <= revenue - cost_k
            std::vector<std::pair<int, double>> row{{eta_, 1.0}};
            for (const auto& [j, c] : revenue_expr_) row.emplace_back(j, -c);
            for (const auto& [j, c] : cp.cost_expr) row.emplace_back(j, c);
            milp_.add_row("EtaLink", RowSense::LE, 0.0, std::move(row));
        } else {
            for (const auto& [j, c] : cp.cost_expr) milp_.add_obj(j, -c);
        }
        return k;
    }

    /// Dispatch cost (including penalties) of copy k at a solution.
    double copy_cost(int k, const std::vector<double>& x) const {
        double v = 0.0;
        for (const auto& [j, c] : copies_[k].cost_expr) v += c * x[j];
        return v;
    }

private:
    const ScenarioData& sc_;
    const SessionSpec& sess_;
    BuildOptions opts_;
    int T_;
    double dt_, tr_, cap_total_;
    int w0_ = 0, w1_ = 0;
    MilpInstance milp_;

    std::vector<int> pe_, sell_, buy_, rvup_, rvdn_, incp_, incm_;
    std::map<std::string, std::vector<int>> u_, v_;
    std::map<std::string, std::vector<int>> prof_;
    int eta_ = -1;
    std::vector<std::pair<int, double>> revenue_expr_;

    struct Copy {
        std::map<std::string, UnitVars> units;
        std::vector<int> slacks;
        std::vector<UncertainRowRef> uncertain;
        std::vector<std::pair<int, double>> cost_expr;
    };
    std::vector<Copy> copies_;

    static const std::vector<double>* family_delta(const Realization& xi, const FamilyId& f) {
        auto it = xi.delta.find(f);
        return it == xi.delta.end() ? nullptr : &it->second;
    }

    void build_first_stage() {
        w0_ = sess_.window_first - 1;
        w1_ = sess_.window_last - 1;

        double rv_up_cap = 0.0, rv_dn_cap = 0.0;
        auto add_caps = [&](double ru, double rd) {
            rv_up_cap += tr_ * ru;
            rv_dn_cap += tr_ * rd;
        };
        for (const auto& u : sc_.dispatchable) add_caps(u.ramp_up, u.ramp_down);
        for (const auto& u : sc_.non_dispatchable) add_caps(u.ramp_up, u.ramp_down);
        for (const auto& u : sc_.csp) add_caps(u.ramp_up, u.ramp_down);
        for (const auto& u : sc_.flexible_demand) add_caps(u.ramp_up, u.ramp_down);

        for (int t = 0; t < T_; ++t) {
            pe_.push_back(milp_.add_var(names::t("pE", t, 0), -cap_total_, cap_total_));
            sell_.push_back(milp_.add_var(names::t("sell", t, 0), 0.0, cap_total_));
            buy_.push_back(milp_.add_var(names::t("buy", t, 0), 0.0, cap_total_));
            rvup_.push_back(milp_.add_var(names::t("rvup", t, 0), 0.0, rv_up_cap));
            rvdn_.push_back(milp_.add_var(names::t("rvdn", t, 0), 0.0, rv_dn_cap));
            milp_.add_row("PosSplit", RowSense::EQ, 0.0,
                          {{pe_[t], 1.0}, {sell_[t], -1.0}, {buy_[t], 1.0}});
        }

        if (sess_.kind == SessionKind::Idm) {
            for (int t = w0_; t <= w1_; ++t) {
                const double prior =
                    opts_.prior_energy ? (*opts_.prior_energy)[t] : 0.0;
                const int ip = milp_.add_var(names::t("incp", t, 0), 0.0, 2 * cap_total_);
                const int im = milp_.add_var(names::t("incm", t, 0), 0.0, 2 * cap_total_);
                incp_.push_back(ip);
                incm_.push_back(im);
                milp_.add_row("IncSplit", RowSense::EQ, -prior,
                              {{ip, 1.0}, {im, -1.0}, {pe_[t], -1.0}});
            }
        }

        for (const auto& un : sc_.dispatchable) add_commitment(un.name, un.min_up, un.min_down, un.initially_on);
        for (const auto& un : sc_.csp) add_commitment(un.name, un.min_up, un.min_down, un.initially_on);

        for (const auto& un : sc_.flexible_demand) {
            std::vector<int>& pv = prof_[un.name];
            std::vector<std::pair<int, double>> excl;
            for (int m = 0; m < (int)un.profiles.size(); ++m) {
                pv.push_back(milp_.add_var("prof_" + un.name + "_m" + std::to_string(m),
                                           0.0, 1.0, VarKind::Binary));
                excl.emplace_back(pv.back(), 1.0);
            }
            milp_.add_row("Eq6b", RowSense::EQ, 1.0, std::move(excl));
        }

        build_revenue_expr();

        if (opts_.with_eta) {
            eta_ = milp_.add_var("eta", -kInf, kInf, VarKind::Continuous, 1.0);
        } else {
            for (const auto& [j, c] : revenue_expr_) milp_.add_obj(j, c);
        }
    }

    void add_commitment(const std::string& name, int min_up, int min_down, bool initially_on) {
        std::vector<int>& uvec = u_[name];
        std::vector<int>& vvec = v_[name];
        for (int t = 0; t < T_; ++t) {
            uvec.push_back(milp_.add_var("u_" + name + "_t" + std::to_string(t), 0.0, 1.0,
                                         VarKind::Binary));
            vvec.push_back(milp_.add_var("vst_" + name + "_t" + std::to_string(t), 0.0, 1.0));
        }
        add_min_updown(milp_, uvec, vvec, min_up, min_down, initially_on);
    }

    void build_revenue_expr() {
        const double eps = opts_.tie_break_eps;
        if (sess_.has_revenue(Revenue::Energy)) {
            if (sess_.kind == SessionKind::Idm) {
                const PriceBand* pb = sc_.idm_price(sess_.idm_session);
                for (int t = w0_; t <= w1_; ++t) {
                    const double lam = pb->nominal[t - w0_] * dt_;
                    revenue_expr_.emplace_back(incp_[t - w0_], lam);
                    revenue_expr_.emplace_back(incm_[t - w0_], -lam);
                }
            } else {
                for (int t = 0; t < T_; ++t)
                    revenue_expr_.emplace_back(pe_[t], sc_.dam_price.nominal[t] * dt_);
            }
        }
        if (sess_.has_revenue(Revenue::ReserveUp))
            for (int t = 0; t < T_; ++t)
                revenue_expr_.emplace_back(rvup_[t], sc_.srm_up_price.nominal[t]);
        if (sess_.has_revenue(Revenue::ReserveDown))
            for (int t = 0; t < T_; ++t)
                revenue_expr_.emplace_back(rvdn_[t], sc_.srm_down_price.nominal[t]);
        for (int t = 0; t < T_; ++t) revenue_expr_.emplace_back(buy_[t], -eps);
        // increments carry the epsilon too so an unchanged position wins ties
        for (int j : incp_) revenue_expr_.emplace_back(j, -eps);
        for (int j : incm_) revenue_expr_.emplace_back(j, -eps);
    }

public:
    /// Minimum up/down rows in the startup-indicator form: v bounds the
    /// commitment flips exactly, then rolling sums of startups enforce the
    /// dwell times. With UT <= 1 and DT <= 1 only the startup logic remains.
    static void add_min_updown(MilpInstance& m, const std::vector<int>& u,
                               const std::vector<int>& v, int min_up, int min_down,
                               bool initially_on) {
        const int T = (int)u.size();
        const double u_init = initially_on ? 1.0 : 0.0;
        for (int t = 0; t < T; ++t) {
            if (t == 0) {
                m.add_row("StartLogic", RowSense::GE, -u_init, {{v[0], 1.0}, {u[0], -1.0}});
                m.add_row("StartLogic", RowSense::LE, 1.0 - u_init, {{v[0], 1.0}});
            } else {
                m.add_row("StartLogic", RowSense::GE, 0.0,
                          {{v[t], 1.0}, {u[t], -1.0}, {u[t - 1], 1.0}});
                m.add_row("StartLogic", RowSense::LE, 1.0, {{v[t], 1.0}, {u[t - 1], 1.0}});
            }
            m.add_row("StartLogic", RowSense::LE, 0.0, {{v[t], 1.0}, {u[t], -1.0}});
        }
        if (min_up >= 2) {
            for (int t = 0; t < T; ++t) {
                std::vector<std::pair<int, double>> row;
                for (int tau = std::max(0, t - min_up + 1); tau <= t; ++tau)
                    row.emplace_back(v[tau], 1.0);
                row.emplace_back(u[t], -1.0);
                m.add_row("MinUp", RowSense::LE, 0.0, std::move(row));
            }
        }
        if (min_down >= 2) {
            for (int t = 1; t < T; ++t) {
                std::vector<std::pair<int, double>> row;
                for (int tau = std::max(0, t - min_down + 1); tau <= t; ++tau)
                    row.emplace_back(v[tau], 1.0);
                if (t - min_down >= 0) {
                    row.emplace_back(u[t - min_down], 1.0);
                    m.add_row("MinDown", RowSense::LE, 1.0, std::move(row));
                } else {
                    // the reference commitment lies before the horizon
                    m.add_row("MinDown", RowSense::LE, 1.0 - u_init, std::move(row));
                }
            }
        }
    }
};

/// Deterministic session MILP per the published constraint families, with an
/// optional fixed realization shifting the uncertain capacities.
inline std::unique_ptr<SessionModelBuilder> build_session_model(
    const ScenarioData& sc, const SessionSpec& sess, const Fixings& fixings = {},
    const Realization& xi = {}, BuildOptions opts = {}) {
    auto b = std::make_unique<SessionModelBuilder>(sc, sess, opts);
    b->add_scenario_copy(xi);
    apply_fixings(b->milp(), fixings);
    return b;
}

/// Re-reads a solved model into a Schedule and re-checks the structural
/// identities numerically.
inline Schedule extract_schedule(const SessionModelBuilder& b, const ScenarioData& sc,
                                 const std::vector<double>& x, double objective, int copy = 0) {
    const int T = sc.grid.periods;
    Schedule s;
    s.objective = objective;
    s.energy_pos.resize(T);
    s.reserve_up_pos.resize(T);
    s.reserve_down_pos.resize(T);
    s.balance_slack.assign(T, 0.0);
    for (int t = 0; t < T; ++t) {
        s.energy_pos[t] = x[b.pe(t)];
        s.reserve_up_pos[t] = x[b.rvup(t)];
        s.reserve_down_pos[t] = x[b.rvdn(t)];
    }
    double slack_total = 0.0;
    for (int sv : b.slack_vars(copy)) slack_total += std::abs(x[sv]);

    auto fill_unit = [&](const std::string& name, bool committed, bool is_csp, bool is_fd) {
        const auto& uv = b.unit_vars(copy, name);
        UnitSchedule us;
        us.p.resize(T); us.r_up.resize(T); us.r_down.resize(T);
        for (int t = 0; t < T; ++t) {
            us.p[t] = x[uv.p[t]];
            us.r_up[t] = x[uv.rup[t]];
            us.r_down[t] = x[uv.rdn[t]];
        }
        if (committed) {
            us.commitment.resize(T);
            us.startup.resize(T);
            for (int t = 0; t < T; ++t) {
                us.commitment[t] = x[b.commit(name, t)];
                us.startup[t] = x[b.startup(name, t)];
            }
        }
        if (is_csp) {
            us.p_sf.resize(T); us.ts_charge.resize(T); us.ts_discharge.resize(T); us.ts_energy.resize(T);
            for (int t = 0; t < T; ++t) {
                us.p_sf[t] = x[uv.sf[t]];
                us.ts_charge[t] = x[uv.tsc[t]];
                us.ts_discharge[t] = x[uv.tsd[t]];
                us.ts_energy[t] = x[uv.ets[t]];
            }
        }
        if (is_fd) {
            double bestv = -1.0;
            const auto& fd = *std::find_if(sc.flexible_demand.begin(), sc.flexible_demand.end(),
                                           [&](const FlexibleDemand& f) { return f.name == name; });
            for (int m = 0; m < (int)fd.profiles.size(); ++m) {
                const double v = x[b.profile_var(name, m)];
                if (v > bestv) { bestv = v; us.chosen_profile = m; }
            }
        }
        s.units.emplace(name, std::move(us));
    };
    for (const auto& u : sc.dispatchable) fill_unit(u.name, true, false, false);
    for (const auto& u : sc.non_dispatchable) fill_unit(u.name, false, false, false);
    for (const auto& u : sc.csp) fill_unit(u.name, true, true, false);
    for (const auto& u : sc.flexible_demand) fill_unit(u.name, false, false, true);

    // structural re-check (tolerance 1e-6 absolute, slack-aware)
    const double tol = 1e-6;
    for (int t = 0; t < T; ++t) {
        double gen_up = 0.0, gen_dn = 0.0, gen_no = 0.0;
        for (const auto& [name, us] : s.units) {
            const bool is_fd = std::any_of(sc.flexible_demand.begin(), sc.flexible_demand.end(),
                                           [&](const FlexibleDemand& f) { return f.name == name; });
            const double sign = is_fd ? -1.0 : 1.0;
            gen_up += sign * us.p[t] + us.r_up[t];
            gen_dn += sign * us.p[t] - us.r_down[t];
            gen_no += sign * us.p[t];
        }
        const double up_res = gen_up - (s.energy_pos[t] + s.reserve_up_pos[t]);
        const double dn_res = gen_dn - (s.energy_pos[t] - s.reserve_down_pos[t]);
        const double no_res = gen_no - s.energy_pos[t];
        const double allowance = slack_total + tol;
        if (std::abs(up_res) > allowance || std::abs(dn_res) > allowance ||
            std::abs(no_res) > allowance)
            throw BalanceViolation("balance identity broken at t=" + std::to_string(t) +
                                   " (up " + std::to_string(up_res) + ", down " +
                                   std::to_string(dn_res) + ", none " + std::to_string(no_res) + ")");
        s.balance_slack[t] = std::abs(up_res) + std::abs(dn_res) + std::abs(no_res);
    }
    return s;
}

/// Structural invariants of an extracted schedule; returns human-readable
/// violation strings (empty = clean).
inline std::vector<std::string> check_schedule(const ScenarioData& sc, const Schedule& s,
                                               double tol = 1e-6) {
    std::vector<std::string> bad;
    const int T = sc.grid.periods;
    const double dt = sc.grid.step_hours, tr = sc.reserve.activation_minutes;

    auto caps = [&](const std::string& name, double ru, double rd) {
        const auto& us = s.units.at(name);
        for (int t = 0; t < T; ++t) {
            if (us.r_up[t] > tr * ru + tol)
                bad.push_back(name + ": up reserve above ramp cap, t=" + std::to_string(t));
            if (us.r_down[t] > tr * rd + tol)
                bad.push_back(name + ": down reserve above ramp cap, t=" + std::to_string(t));
            if (us.r_up[t] < -tol || us.r_down[t] < -tol)
                bad.push_back(name + ": negative reserve, t=" + std::to_string(t));
        }
    };
    for (const auto& u : sc.dispatchable) caps(u.name, u.ramp_up, u.ramp_down);
    for (const auto& u : sc.non_dispatchable) caps(u.name, u.ramp_up, u.ramp_down);
    for (const auto& u : sc.csp) caps(u.name, u.ramp_up, u.ramp_down);
    for (const auto& u : sc.flexible_demand) caps(u.name, u.ramp_up, u.ramp_down);

    for (const auto& u : sc.csp) {
        const auto& us = s.units.at(u.name);
        double rhs_sum = 0.0;
        for (int t = 0; t < T; ++t) {
            const double conv = us.p[t] / u.turbine_eff;
            const double therm = us.p_sf[t] + us.ts_discharge[t] - us.ts_charge[t] -
                                 u.startup_loss * us.startup[t] * u.p_max;
            if (std::abs(conv - therm) > tol)
                bad.push_back(u.name + ": turbine thermal balance broken, t=" + std::to_string(t));
            rhs_sum += (us.ts_charge[t] * u.ts_charge_eff - us.ts_discharge[t] / u.ts_discharge_eff) * dt;
        }
        const double lhs = us.ts_energy[T - 1] - u.ts_initial;
        if (std::abs(lhs - rhs_sum) > tol)
            bad.push_back(u.name + ": storage telescoping broken (" + std::to_string(lhs - rhs_sum) + ")");
    }

    for (const auto& u : sc.flexible_demand) {
        const auto& us = s.units.at(u.name);
        if (us.chosen_profile < 0 || us.chosen_profile >= (int)u.profiles.size())
            bad.push_back(u.name + ": no active profile");
    }

    for (int t = 0; t < T; ++t) {
        double gen_up = 0.0, gen_dn = 0.0, gen_no = 0.0;
        for (const auto& u : sc.flexible_demand) {
            const auto& us = s.units.at(u.name);
            gen_up += -us.p[t] + us.r_up[t];
            gen_dn += -us.p[t] - us.r_down[t];
            gen_no += -us.p[t];
        }
        auto add_gen = [&](const UnitSchedule& us) {
            gen_up += us.p[t] + us.r_up[t];
            gen_dn += us.p[t] - us.r_down[t];
            gen_no += us.p[t];
        };
        for (const auto& u : sc.dispatchable) add_gen(s.units.at(u.name));
        for (const auto& u : sc.non_dispatchable) add_gen(s.units.at(u.name));
        for (const auto& u : sc.csp) add_gen(s.units.at(u.name));
        const double slack = s.balance_slack.empty() ? 0.0 : s.balance_slack[t];
        if (std::abs(gen_up - s.energy_pos[t] - s.reserve_up_pos[t]) > tol + slack)
            bad.push_back("balance up broken, t=" + std::to_string(t));
        if (std::abs(gen_dn - s.energy_pos[t] + s.reserve_down_pos[t]) > tol + slack)
            bad.push_back("balance down broken, t=" + std::to_string(t));
        if (std::abs(gen_no - s.energy_pos[t]) > tol + slack)
            bad.push_back("balance none broken, t=" + std::to_string(t));
    }
    return bad;
}

} // namespace rvpp
