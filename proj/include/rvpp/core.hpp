#pragma once

// Domain types for a renewable virtual power plant (RVPP) that trades energy
// and secondary reserve across day-ahead, reserve, and intraday sessions.
// Everything here is a plain value type; instances are immutable after
// construction and safe to share across threads. No optimization logic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rvpp {

struct TimeGrid {
    int periods = 24;        // hourly steps T
    double step_hours = 1.0; // duration of one period
};

enum class Product { EnergyDam, ReserveUp, ReserveDown, EnergyIdm };

/// Price forecast as nominal value plus the maximum adverse move per period.
struct PriceBand {
    Product product = Product::EnergyDam;
    int idm_session = 0; // k for EnergyIdm, 0 otherwise
    std::vector<double> nominal;   // EUR/MWh
    std::vector<double> deviation; // EUR/MWh, >= 0
};

/// Interval forecast for an uncertain MW series.
struct ForecastBand {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct DispatchableUnit {
    std::string name;
    double p_max = 0.0, p_min = 0.0; // MW
    double ramp_up = 0.0, ramp_down = 0.0; // MW/min
    int min_up = 0, min_down = 0; // hours
    double cost = 0.0; // EUR/MWh
    bool initially_on = false;
};

struct NonDispatchableUnit {
    std::string name;
    ForecastBand band; // production cap per period
    double p_min = 0.0;
    double ramp_up = 0.0, ramp_down = 0.0;
    double cost = 0.0;

    double p_max() const {
        double m = 0.0;
        for (double v : band.upper) m = std::max(m, v);
        return m;
    }
};

struct CspUnit {
    std::string name;
    double p_max = 0.0, p_min = 0.0;  // MW electric
    double turbine_eff = 0.95;        // thermal -> electric
    double startup_loss = 0.1;        // multiplier on p_max, thermal MW lost per startup
    ForecastBand sf_band;             // solar-field thermal cap, MW thermal
    double ts_energy_max = 0.0, ts_energy_min = 0.0; // MWh thermal
    double ts_charge_eff = 0.9, ts_discharge_eff = 0.9;
    double ts_initial = 0.0;          // MWh
    std::optional<double> ts_charge_max;    // MW thermal; default: max sf upper
    std::optional<double> ts_discharge_max; // MW thermal; default: max sf upper
    double ramp_up = 0.0, ramp_down = 0.0;
    int min_up = 0, min_down = 0;
    double cost = 0.0;
    bool initially_on = false;

    double charge_cap() const {
        if (ts_charge_max) return *ts_charge_max;
        double m = 0.0;
        for (double v : sf_band.upper) m = std::max(m, v);
        return m;
    }
    double discharge_cap() const {
        if (ts_discharge_max) return *ts_discharge_max;
        double m = 0.0;
        for (double v : sf_band.upper) m = std::max(m, v);
        return m;
    }
};

struct FlexibleDemand {
    std::string name;
    std::vector<std::vector<double>> profiles; // M arrays of per-period MW
    double flexibility_fraction = 0.1; // fraction of nominal that may deviate
    double p_min = 0.0, p_max = 0.0;
    double ramp_up = 0.0, ramp_down = 0.0;
    std::optional<double> daily_energy_min; // MWh, optional

    // The minimum-load band of profile m: nominal profile widened by the
    // flexibility margin, clamped to the unit's feasible range.
    double profile_lower(int m, int t) const {
        return std::clamp(profiles[m][t] * (1.0 - flexibility_fraction), p_min, p_max);
    }
    double profile_upper(int m, int t) const {
        return std::clamp(profiles[m][t] * (1.0 + flexibility_fraction), p_min, p_max);
    }
};

struct ReserveSpec {
    double activation_minutes = 15.0; // T^R
};

/// Identifies one uncertain series. Quantity families are keyed by unit name.
struct FamilyId {
    enum Kind { DamPrice, SrmUpPrice, SrmDownPrice, IdmPrice, Ndrs, CspThermal, FdConsumption };
    Kind kind = DamPrice;
    std::string key; // unit name for quantity families, empty for prices
    int idm_session = 0;

    bool operator<(const FamilyId& o) const {
        if (kind != o.kind) return kind < o.kind;
        if (idm_session != o.idm_session) return idm_session < o.idm_session;
        return key < o.key;
    }
    bool operator==(const FamilyId& o) const {
        return kind == o.kind && key == o.key && idm_session == o.idm_session;
    }
    std::string str() const {
        switch (kind) {
            case DamPrice: return "dam_price";
            case SrmUpPrice: return "srm_up_price";
            case SrmDownPrice: return "srm_down_price";
            case IdmPrice: return "idm_price(" + std::to_string(idm_session) + ")";
            case Ndrs: return "ndrs:" + key;
            case CspThermal: return "csp_thermal:" + key;
            case FdConsumption: return "fd:" + key;
        }
        return "?";
    }
};

/// Budget of uncertainty per family: how many periods may deviate.
struct BudgetSet {
    std::map<FamilyId, int> gamma;

    int get(const FamilyId& f) const {
        auto it = gamma.find(f);
        return it == gamma.end() ? 0 : it->second;
    }
    bool all_zero() const {
        for (const auto& [f, g] : gamma)
            if (g > 0) return false;
        return true;
    }
};

enum class SessionKind { DamSrmJoint, SrmOnly, Idm };

enum class Revenue { Energy, ReserveUp, ReserveDown };

/// Per-session forecast/price replacements applied before solving.
struct ForecastOverlay {
    // Fractional narrowing of quantity bands toward their nominal edge and of
    // price deviations toward zero; 0 = unchanged, 1 = fully collapsed.
    double narrow_bands = 0.0;
    double narrow_price_deviation = 0.0;
    // Optional explicit replacements; applied after the narrowing transform.
    std::map<std::string, ForecastBand> replace_bands; // unit name -> band
    std::vector<PriceBand> replace_prices;
};

struct SessionSpec {
    SessionKind kind = SessionKind::DamSrmJoint;
    int idm_session = 0;            // k for Idm sessions
    int window_first = 1, window_last = 24; // 1-based inclusive
    std::vector<Revenue> active_revenues;
    std::optional<ForecastOverlay> overlay;
    BudgetSet budgets;

    bool has_revenue(Revenue r) const {
        return std::find(active_revenues.begin(), active_revenues.end(), r) != active_revenues.end();
    }
    int window_len() const { return window_last - window_first + 1; }
    std::string label() const {
        switch (kind) {
            case SessionKind::DamSrmJoint: return "DAM+SRM";
            case SessionKind::SrmOnly: return "SRM";
            case SessionKind::Idm: return "IDM#" + std::to_string(idm_session);
        }
        return "?";
    }
};

/// A full problem instance: time grid, units, forecasts, prices, budgets and
/// the session calendar.
struct ScenarioData {
    TimeGrid grid;
    ReserveSpec reserve;
    std::vector<DispatchableUnit> dispatchable;
    std::vector<NonDispatchableUnit> non_dispatchable;
    std::vector<CspUnit> csp;
    std::vector<FlexibleDemand> flexible_demand;
    PriceBand dam_price, srm_up_price, srm_down_price;
    std::vector<PriceBand> idm_prices; // one per IDM session, window-sized arrays
    std::map<std::string, BudgetSet> strategies; // optimistic / balanced / pessimistic
    std::vector<SessionSpec> sessions;
    std::map<std::string, std::vector<std::string>> partition_groups; // tech -> unit names

    int periods() const { return grid.periods; }
    bool has_unit(const std::string& n) const;
    const PriceBand* idm_price(int k) const {
        for (const auto& b : idm_prices)
            if (b.idm_session == k) return &b;
        return nullptr;
    }
};

/// One adversarial deviation vector: per family, per period, the fraction of
/// the band traversed in the adverse direction.
struct Realization {
    std::map<FamilyId, std::vector<double>> delta;

    bool zero() const {
        for (const auto& [f, d] : delta)
            for (double v : d)
                if (v > 0.0) return false;
        return true;
    }
    double budget_used(const FamilyId& f) const {
        auto it = delta.find(f);
        if (it == delta.end()) return 0.0;
        double s = 0.0;
        for (double v : it->second) s += v;
        return s;
    }
};

/// Per-unit dispatch and RVPP market positions for one solve.
struct UnitSchedule {
    std::vector<double> p;        // MW
    std::vector<double> r_up, r_down;
    std::vector<double> commitment; // 0/1, empty for units without binaries
    std::vector<double> startup;
    // CSP internals (empty otherwise)
    std::vector<double> p_sf, ts_charge, ts_discharge, ts_energy;
    int chosen_profile = -1; // FD only
};

struct Schedule {
    std::map<std::string, UnitSchedule> units;
    std::vector<double> energy_pos;   // signed MW, sell positive
    std::vector<double> reserve_up_pos, reserve_down_pos;
    std::vector<double> balance_slack; // total |slack| per period, 0 in deterministic solves
    double objective = 0.0; // EUR
};

struct Violation {
    std::string field;
    int period = -1; // -1 when not period-specific
    std::string message;
};

namespace detail {

inline void check_band(const ForecastBand& b, int T, const std::string& field,
                       std::vector<Violation>& out) {
    if ((int)b.lower.size() != T || (int)b.upper.size() != T) {
        out.push_back({field, -1, field + ": band length != " + std::to_string(T)});
        return;
    }
    for (int t = 0; t < T; ++t) {
        if (b.lower[t] < 0.0)
            out.push_back({field, t, field + ": band lower < 0, t=" + std::to_string(t)});
        if (b.lower[t] > b.upper[t])
            out.push_back({field, t, field + ": band order, t=" + std::to_string(t)});
    }
}

inline void check_price(const PriceBand& p, int len, const std::string& field,
                        std::vector<Violation>& out) {
    if ((int)p.nominal.size() != len || (int)p.deviation.size() != len) {
        out.push_back({field, -1, field + ": price array length != " + std::to_string(len)});
        return;
    }
    for (int t = 0; t < len; ++t)
        if (p.deviation[t] < 0.0)
            out.push_back({field, t, field + ": negative deviation, t=" + std::to_string(t)});
}

} // namespace detail

inline bool ScenarioData::has_unit(const std::string& n) const {
    for (const auto& u : dispatchable) if (u.name == n) return true;
    for (const auto& u : non_dispatchable) if (u.name == n) return true;
    for (const auto& u : csp) if (u.name == n) return true;
    for (const auto& u : flexible_demand) if (u.name == n) return true;
    return false;
}

/// Checks every type invariant; returns an empty list iff the instance is
/// well formed. Pure and deterministic.
inline std::vector<Violation> validate(const ScenarioData& s) {
    std::vector<Violation> v;
    const int T = s.grid.periods;
    if (T < 1) v.push_back({"grid.periods", -1, "periods must be >= 1"});
    if (!(s.grid.step_hours > 0.0)) v.push_back({"grid.step_hours", -1, "step_hours must be > 0"});
    if (!(s.reserve.activation_minutes > 0.0))
        v.push_back({"reserve.activation_minutes", -1, "activation time must be > 0"});
    if (T < 1) return v;

    detail::check_price(s.dam_price, T, "prices.dam", v);
    detail::check_price(s.srm_up_price, T, "prices.reserve_up", v);
    detail::check_price(s.srm_down_price, T, "prices.reserve_down", v);

    for (const auto& u : s.dispatchable) {
        const std::string f = "units." + u.name;
        if (u.p_min < 0.0 || u.p_min > u.p_max)
            v.push_back({f, -1, f + ": requires 0 <= p_min <= p_max"});
        if (u.ramp_up < 0.0 || u.ramp_down < 0.0)
            v.push_back({f, -1, f + ": negative ramp rate"});
        if (u.min_up < 0 || u.min_down < 0)
            v.push_back({f, -1, f + ": negative min up/down time"});
    }
    for (const auto& u : s.non_dispatchable) {
        const std::string f = "units." + u.name;
        detail::check_band(u.band, T, f, v);
        if ((int)u.band.lower.size() == T)
            for (int t = 0; t < T; ++t)
                if (u.p_min > u.band.lower[t] + 1e-12)
                    v.push_back({f, t, f + ": p_min above band lower, t=" + std::to_string(t)});
        if (u.ramp_up < 0.0 || u.ramp_down < 0.0)
            v.push_back({f, -1, f + ": negative ramp rate"});
    }
    for (const auto& u : s.csp) {
        const std::string f = "units." + u.name;
        detail::check_band(u.sf_band, T, f + ".sf", v);
        if (u.p_min < 0.0 || u.p_min > u.p_max)
            v.push_back({f, -1, f + ": requires 0 <= p_min <= p_max"});
        if (!(u.turbine_eff > 0.0 && u.turbine_eff <= 1.0))
            v.push_back({f, -1, f + ": turbine efficiency outside (0,1]"});
        if (!(u.ts_charge_eff > 0.0 && u.ts_charge_eff <= 1.0) ||
            !(u.ts_discharge_eff > 0.0 && u.ts_discharge_eff <= 1.0))
            v.push_back({f, -1, f + ": storage efficiency outside (0,1]"});
        if (u.startup_loss < 0.0) v.push_back({f, -1, f + ": negative startup loss"});
        if (!(0.0 <= u.ts_energy_min && u.ts_energy_min <= u.ts_initial &&
              u.ts_initial <= u.ts_energy_max))
            v.push_back({f, -1, f + ": requires 0 <= ts_min <= ts_initial <= ts_max"});
        if (u.min_up < 0 || u.min_down < 0)
            v.push_back({f, -1, f + ": negative min up/down time"});
    }
    for (const auto& u : s.flexible_demand) {
        const std::string f = "units." + u.name;
        if (u.profiles.empty()) {
            v.push_back({f, -1, f + ": needs at least one profile"});
            continue;
        }
        if (u.p_min < 0.0 || u.p_min > u.p_max)
            v.push_back({f, -1, f + ": requires 0 <= p_min <= p_max"});
        if (u.flexibility_fraction < 0.0 || u.flexibility_fraction > 1.0)
            v.push_back({f, -1, f + ": flexibility fraction outside [0,1]"});
        for (size_t m = 0; m < u.profiles.size(); ++m) {
            if ((int)u.profiles[m].size() != T) {
                v.push_back({f, -1, f + ": profile " + std::to_string(m) + " length != T"});
                continue;
            }
            for (int t = 0; t < T; ++t)
                if (u.profiles[m][t] < u.p_min - 1e-12 || u.profiles[m][t] > u.p_max + 1e-12)
                    v.push_back({f, t, f + ": profile " + std::to_string(m) +
                                        " outside [p_min,p_max], t=" + std::to_string(t)});
        }
    }

    auto check_budgets = [&](const BudgetSet& b, const std::string& where) {
        for (const auto& [fam, g] : b.gamma) {
            int horizon = T;
            if (fam.kind == FamilyId::IdmPrice) {
                for (const auto& sess : s.sessions)
                    if (sess.kind == SessionKind::Idm && sess.idm_session == fam.idm_session)
                        horizon = sess.window_len();
            }
            if (g < 0 || g > horizon)
                v.push_back({where, -1, where + ": budget exceeds horizon: " + fam.str()});
            if (fam.kind == FamilyId::Ndrs || fam.kind == FamilyId::CspThermal ||
                fam.kind == FamilyId::FdConsumption) {
                if (!s.has_unit(fam.key))
                    v.push_back({where, -1, where + ": budget for unknown unit: " + fam.str()});
            }
        }
    };
    for (const auto& [name, b] : s.strategies) check_budgets(b, "budgets." + name);

    for (size_t i = 0; i < s.sessions.size(); ++i) {
        const auto& sess = s.sessions[i];
        const std::string f = "sessions[" + std::to_string(i) + "]";
        if (sess.window_first < 1 || sess.window_last > T || sess.window_first > sess.window_last)
            v.push_back({f, -1, f + ": window outside time grid"});
        if (sess.kind == SessionKind::Idm) {
            if (sess.has_revenue(Revenue::ReserveUp) || sess.has_revenue(Revenue::ReserveDown))
                v.push_back({f, -1, f + ": IDM sessions cannot carry reserve revenues"});
            const PriceBand* pb = s.idm_price(sess.idm_session);
            if (!pb)
                v.push_back({f, -1, f + ": no price band for IDM#" + std::to_string(sess.idm_session)});
            else
                detail::check_price(*pb, sess.window_len(),
                                    "prices.idm" + std::to_string(sess.idm_session), v);
        }
        check_budgets(sess.budgets, f + ".budgets");
    }

    if (!s.partition_groups.empty()) {
        std::map<std::string, int> seen;
        for (const auto& [g, members] : s.partition_groups)
            for (const auto& m : members) {
                if (!s.has_unit(m))
                    v.push_back({"partition." + g, -1, "partition." + g + ": unknown unit " + m});
                if (++seen[m] > 1)
                    v.push_back({"partition." + g, -1, "partition." + g + ": unit " + m + " in two groups"});
            }
    }
    return v;
}

} // namespace rvpp
