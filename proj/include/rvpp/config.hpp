#pragma once

// Configuration ingestion: one JSON document (docs/config.md) with optional
// CSV side-files for long series. Loading validates the instance and applies
// defaults: 1 h steps, 15 min reserve activation, and horizon-scaled budgets
// when no budget table is given.

#include "core.hpp"
#include "csv.hpp"
#include "solver.hpp"
#include "robust.hpp"

#include <json.hpp>

#include <filesystem>

namespace rvpp {

struct SchemaError : std::runtime_error {
    SchemaError(const std::string& path, const std::string& what)
        : std::runtime_error("schema error at " + path + ": " + what), pointer(path) {}
    std::string pointer;
};

struct LengthMismatch : std::runtime_error {
    LengthMismatch(const std::string& path, size_t got, size_t want)
        : std::runtime_error("length mismatch at " + path + ": got " + std::to_string(got) +
                             ", expected " + std::to_string(want)) {}
};

struct LoadedConfig {
    ScenarioData scenario;
    SolveOptions solver;
    RobustOptions robust;
    std::string base_dir; // for resolving side files
};

namespace cfg {

using nlohmann::json;

inline const json& need(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(path + "/" + key, "missing");
    return *it;
}

/// A series is an inline array or {"csv": "file.csv", "column": "name"}.
inline std::vector<double> series(const json& j, const std::string& path,
                                  const std::string& base_dir, size_t want_len) {
    std::vector<double> out;
    if (j.is_array()) {
        for (const auto& v : j) {
            if (!v.is_number()) throw SchemaError(path, "expected numbers");
            out.push_back(v.get<double>());
        }
    } else if (j.is_object()) {
        const std::string file = need(j, "csv", path).get<std::string>();
        const std::string col = need(j, "column", path).get<std::string>();
        const auto rows = parse_csv(read_text_file(
            (std::filesystem::path(base_dir) / file).string()));
        if (rows.empty()) throw SchemaError(path, "empty csv " + file);
        size_t ci = SIZE_MAX;
        for (size_t c = 0; c < rows[0].size(); ++c)
            if (rows[0][c] == col) ci = c;
        if (ci == SIZE_MAX) throw SchemaError(path, "csv " + file + " has no column " + col);
        for (size_t r = 1; r < rows.size(); ++r) {
            if (ci >= rows[r].size()) throw SchemaError(path, "ragged csv " + file);
            out.push_back(std::stod(rows[r][ci]));
        }
    } else {
        throw SchemaError(path, "expected array or {csv,column}");
    }
    if (want_len && out.size() != want_len) throw LengthMismatch(path, out.size(), want_len);
    return out;
}

inline ForecastBand band(const json& j, const std::string& path, const std::string& base_dir,
                         size_t len) {
    ForecastBand b;
    b.lower = series(need(j, "lower", path), path + "/lower", base_dir, len);
    b.upper = series(need(j, "upper", path), path + "/upper", base_dir, len);
    return b;
}

inline PriceBand price(const json& j, const std::string& path, const std::string& base_dir,
                       size_t len, Product prod, int idm = 0) {
    PriceBand p;
    p.product = prod;
    p.idm_session = idm;
    p.nominal = series(need(j, "nominal", path), path + "/nominal", base_dir, len);
    if (j.contains("deviation"))
        p.deviation = series(j["deviation"], path + "/deviation", base_dir, len);
    else
        p.deviation.assign(p.nominal.size(), 0.0);
    return p;
}

inline BudgetSet budgets(const json& j, const std::string& path) {
    BudgetSet b;
    auto geti = [&](const json& v, const std::string& p) {
        if (!v.is_number_integer()) throw SchemaError(p, "budget must be an integer");
        return v.get<int>();
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k == "dam_price") b.gamma[{FamilyId::DamPrice, "", 0}] = geti(*it, path + "/" + k);
        else if (k == "srm_up_price") b.gamma[{FamilyId::SrmUpPrice, "", 0}] = geti(*it, path + "/" + k);
        else if (k == "srm_down_price") b.gamma[{FamilyId::SrmDownPrice, "", 0}] = geti(*it, path + "/" + k);
        else if (k == "idm_price")
            for (auto s = it->begin(); s != it->end(); ++s)
                b.gamma[{FamilyId::IdmPrice, "", std::stoi(s.key())}] = geti(*s, path + "/idm_price");
        else if (k == "ndrs")
            for (auto s = it->begin(); s != it->end(); ++s)
                b.gamma[{FamilyId::Ndrs, s.key(), 0}] = geti(*s, path + "/ndrs");
        else if (k == "csp_thermal")
            for (auto s = it->begin(); s != it->end(); ++s)
                b.gamma[{FamilyId::CspThermal, s.key(), 0}] = geti(*s, path + "/csp_thermal");
        else if (k == "fd")
            for (auto s = it->begin(); s != it->end(); ++s)
                b.gamma[{FamilyId::FdConsumption, s.key(), 0}] = geti(*s, path + "/fd");
        else
            throw SchemaError(path + "/" + k, "unknown budget family");
    }
    return b;
}

inline ForecastOverlay overlay(const json& j, const std::string& path,
                               const std::string& base_dir, size_t len) {
    ForecastOverlay ov;
    if (j.contains("narrow_bands")) ov.narrow_bands = j["narrow_bands"].get<double>();
    if (j.contains("narrow_price_deviation"))
        ov.narrow_price_deviation = j["narrow_price_deviation"].get<double>();
    if (j.contains("replace_bands"))
        for (auto it = j["replace_bands"].begin(); it != j["replace_bands"].end(); ++it)
            ov.replace_bands[it.key()] =
                band(*it, path + "/replace_bands/" + it.key(), base_dir, len);
    return ov;
}

/// Horizon-consistent default budgets when the config gives none: a quarter
/// of the horizon deviates in the pessimistic strategy, scaled down for
/// series that are partly idle (night-zero solar) or span a shorter window.
inline std::map<std::string, BudgetSet> default_budgets(const ScenarioData& sc) {
    const int T = sc.grid.periods;
    const int full = std::max(1, T / 6), half = std::max(1, T / 12);
    auto tiers = [&](int base) {
        return std::array<int, 3>{base, 2 * base, 3 * base};
    };
    std::map<std::string, BudgetSet> out;
    const char* names[3] = {"optimistic", "balanced", "pessimistic"};
    for (int s = 0; s < 3; ++s) {
        BudgetSet b;
        b.gamma[{FamilyId::DamPrice, "", 0}] = tiers(full)[s];
        b.gamma[{FamilyId::SrmUpPrice, "", 0}] = tiers(full)[s];
        b.gamma[{FamilyId::SrmDownPrice, "", 0}] = tiers(full)[s];
        for (const auto& sess : sc.sessions)
            if (sess.kind == SessionKind::Idm)
                b.gamma[{FamilyId::IdmPrice, "", sess.idm_session}] =
                    sess.window_len() < T ? tiers(half)[s] : tiers(full)[s];
        for (const auto& u : sc.non_dispatchable) {
            int zero = 0;
            for (double v : u.band.upper)
                if (v <= 0.0) ++zero;
            b.gamma[{FamilyId::Ndrs, u.name, 0}] = zero * 3 >= T ? tiers(half)[s] : tiers(full)[s];
        }
        for (const auto& u : sc.csp) b.gamma[{FamilyId::CspThermal, u.name, 0}] = tiers(half)[s];
        for (const auto& u : sc.flexible_demand)
            b.gamma[{FamilyId::FdConsumption, u.name, 0}] = tiers(full)[s];
        out[names[s]] = b;
    }
    return out;
}

} // namespace cfg

inline LoadedConfig load_config(const std::string& path) {
    using nlohmann::json;
    LoadedConfig lc;
    lc.base_dir = std::filesystem::path(path).parent_path().string();
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw SchemaError("/", std::string("not valid JSON: ") + e.what());
    }
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != 1)
        throw SchemaError("/schema_version", "unsupported version");

    ScenarioData& sc = lc.scenario;
    if (doc.contains("grid")) {
        sc.grid.periods = cfg::need(doc["grid"], "periods", "/grid").get<int>();
        if (doc["grid"].contains("step_hours"))
            sc.grid.step_hours = doc["grid"]["step_hours"].get<double>();
    } else {
        throw SchemaError("/grid", "missing");
    }
    if (doc.contains("reserve") && doc["reserve"].contains("activation_minutes"))
        sc.reserve.activation_minutes = doc["reserve"]["activation_minutes"].get<double>();
    const size_t T = (size_t)sc.grid.periods;

    const json& units = cfg::need(doc, "units", "");
    if (units.contains("dispatchable"))
        for (size_t i = 0; i < units["dispatchable"].size(); ++i) {
            const json& u = units["dispatchable"][i];
            const std::string p = "/units/dispatchable/" + std::to_string(i);
            DispatchableUnit d;
            d.name = cfg::need(u, "name", p).get<std::string>();
            d.p_max = cfg::need(u, "p_max", p).get<double>();
            d.p_min = u.value("p_min", 0.0);
            d.ramp_up = u.value("ramp_up", 0.0);
            d.ramp_down = u.value("ramp_down", 0.0);
            d.min_up = u.value("min_up", 0);
            d.min_down = u.value("min_down", 0);
            d.cost = u.value("cost", 0.0);
            d.initially_on = u.value("initially_on", false);
            sc.dispatchable.push_back(std::move(d));
        }
    if (units.contains("non_dispatchable"))
        for (size_t i = 0; i < units["non_dispatchable"].size(); ++i) {
            const json& u = units["non_dispatchable"][i];
            const std::string p = "/units/non_dispatchable/" + std::to_string(i);
            NonDispatchableUnit d;
            d.name = cfg::need(u, "name", p).get<std::string>();
            d.band = cfg::band(cfg::need(u, "band", p), p + "/band", lc.base_dir, T);
            d.p_min = u.value("p_min", 0.0);
            d.ramp_up = u.value("ramp_up", 0.0);
            d.ramp_down = u.value("ramp_down", 0.0);
            d.cost = u.value("cost", 0.0);
            sc.non_dispatchable.push_back(std::move(d));
        }
    if (units.contains("csp"))
        for (size_t i = 0; i < units["csp"].size(); ++i) {
            const json& u = units["csp"][i];
            const std::string p = "/units/csp/" + std::to_string(i);
            CspUnit d;
            d.name = cfg::need(u, "name", p).get<std::string>();
            d.p_max = cfg::need(u, "p_max", p).get<double>();
            d.p_min = u.value("p_min", 0.0);
            d.turbine_eff = u.value("turbine_eff", 0.95);
            d.startup_loss = u.value("startup_loss", 0.1);
            d.sf_band = cfg::band(cfg::need(u, "sf_band", p), p + "/sf_band", lc.base_dir, T);
            d.ts_energy_max = u.value("ts_energy_max", 0.0);
            d.ts_energy_min = u.value("ts_energy_min", 0.0);
            d.ts_charge_eff = u.value("ts_charge_eff", 0.9);
            d.ts_discharge_eff = u.value("ts_discharge_eff", 0.9);
            d.ts_initial = u.value("ts_initial", d.ts_energy_min);
            if (u.contains("ts_charge_max")) d.ts_charge_max = u["ts_charge_max"].get<double>();
            if (u.contains("ts_discharge_max")) d.ts_discharge_max = u["ts_discharge_max"].get<double>();
            d.ramp_up = u.value("ramp_up", 0.0);
            d.ramp_down = u.value("ramp_down", 0.0);
            d.min_up = u.value("min_up", 0);
            d.min_down = u.value("min_down", 0);
            d.cost = u.value("cost", 0.0);
            d.initially_on = u.value("initially_on", false);
            sc.csp.push_back(std::move(d));
        }
    if (units.contains("flexible_demand"))
        for (size_t i = 0; i < units["flexible_demand"].size(); ++i) {
            const json& u = units["flexible_demand"][i];
            const std::string p = "/units/flexible_demand/" + std::to_string(i);
            FlexibleDemand d;
            d.name = cfg::need(u, "name", p).get<std::string>();
            for (size_t m = 0; m < cfg::need(u, "profiles", p).size(); ++m)
                d.profiles.push_back(cfg::series(u["profiles"][m],
                                                 p + "/profiles/" + std::to_string(m),
                                                 lc.base_dir, T));
            d.flexibility_fraction = u.value("flexibility_fraction", 0.1);
            d.p_min = u.value("p_min", 0.0);
            d.p_max = cfg::need(u, "p_max", p).get<double>();
            d.ramp_up = u.value("ramp_up", 0.0);
            d.ramp_down = u.value("ramp_down", 0.0);
            if (u.contains("daily_energy_min"))
                d.daily_energy_min = u["daily_energy_min"].get<double>();
            sc.flexible_demand.push_back(std::move(d));
        }

    const json& prices = cfg::need(doc, "prices", "");
    sc.dam_price = cfg::price(cfg::need(prices, "dam", "/prices"), "/prices/dam", lc.base_dir, T,
                              Product::EnergyDam);
    sc.srm_up_price = cfg::price(cfg::need(prices, "reserve_up", "/prices"), "/prices/reserve_up",
                                 lc.base_dir, T, Product::ReserveUp);
    sc.srm_down_price = cfg::price(cfg::need(prices, "reserve_down", "/prices"),
                                   "/prices/reserve_down", lc.base_dir, T, Product::ReserveDown);

    if (doc.contains("sessions"))
        for (size_t i = 0; i < doc["sessions"].size(); ++i) {
            const json& s = doc["sessions"][i];
            const std::string p = "/sessions/" + std::to_string(i);
            SessionSpec sess;
            const std::string kind = cfg::need(s, "kind", p).get<std::string>();
            if (kind == "dam_srm") {
                sess.kind = SessionKind::DamSrmJoint;
                sess.active_revenues = {Revenue::Energy, Revenue::ReserveUp, Revenue::ReserveDown};
            } else if (kind == "srm") {
                sess.kind = SessionKind::SrmOnly;
                sess.active_revenues = {Revenue::ReserveUp, Revenue::ReserveDown};
            } else if (kind == "idm") {
                sess.kind = SessionKind::Idm;
                sess.idm_session = cfg::need(s, "idm_session", p).get<int>();
                sess.active_revenues = {Revenue::Energy};
            } else {
                throw SchemaError(p + "/kind", "unknown session kind " + kind);
            }
            if (s.contains("window")) {
                sess.window_first = s["window"][0].get<int>();
                sess.window_last = s["window"][1].get<int>();
            } else {
                sess.window_first = 1;
                sess.window_last = (int)T;
            }
            if (s.contains("overlay")) {
                if (s["overlay"].is_string()) {
                    const std::string of =
                        (std::filesystem::path(lc.base_dir) / s["overlay"].get<std::string>())
                            .string();
                    nlohmann::json oj = nlohmann::json::parse(read_text_file(of));
                    sess.overlay = cfg::overlay(oj, p + "/overlay", lc.base_dir, T);
                } else {
                    sess.overlay = cfg::overlay(s["overlay"], p + "/overlay", lc.base_dir, T);
                }
            }
            sc.sessions.push_back(std::move(sess));
        }

    if (prices.contains("idm"))
        for (size_t i = 0; i < prices["idm"].size(); ++i) {
            const json& b = prices["idm"][i];
            const std::string p = "/prices/idm/" + std::to_string(i);
            const int k = cfg::need(b, "session", p).get<int>();
            size_t len = T;
            for (const auto& s : sc.sessions)
                if (s.kind == SessionKind::Idm && s.idm_session == k) len = (size_t)s.window_len();
            sc.idm_prices.push_back(cfg::price(b, p, lc.base_dir, len, Product::EnergyIdm, k));
        }

    if (doc.contains("budgets"))
        for (auto it = doc["budgets"].begin(); it != doc["budgets"].end(); ++it)
            sc.strategies[it.key()] = cfg::budgets(*it, "/budgets/" + it.key());
    else
        sc.strategies = cfg::default_budgets(sc);

    if (doc.contains("partition"))
        for (auto it = doc["partition"].begin(); it != doc["partition"].end(); ++it)
            for (const auto& m : *it)
                sc.partition_groups[it.key()].push_back(m.get<std::string>());

    if (doc.contains("solver")) {
        const json& s = doc["solver"];
        lc.solver.backend = s.value("backend", "bundled");
        lc.solver.mip_gap_rel = s.value("mip_gap_rel", 1e-6);
        if (s.contains("time_limit_s")) lc.solver.time_limit_s = s["time_limit_s"].get<double>();
        lc.solver.external_cmd = s.value("external_cmd", "");
    }
    if (doc.contains("robust")) {
        const json& r = doc["robust"];
        lc.robust.eps_rel = r.value("eps_rel", 1e-4);
        lc.robust.max_iters = r.value("max_iters", 50);
        lc.robust.adversary_mode = r.value("adversary_mode", "dual_bigM");
        if (r.contains("slack_penalty")) lc.robust.slack_penalty = r["slack_penalty"].get<double>();
    }

    const auto violations = validate(sc);
    if (!violations.empty()) {
        std::string msg = "instance invalid:";
        for (const auto& v : violations) msg += "\n  " + v.message;
        throw SchemaError("/", msg);
    }
    return lc;
}

/// Copies the named strategy's budgets into every session (sessions keep any
/// explicitly configured overrides only when the strategy lacks the family).
inline void select_strategy(ScenarioData& sc, const std::string& strategy) {
    auto it = sc.strategies.find(strategy);
    if (it == sc.strategies.end())
        throw SchemaError("/budgets/" + strategy, "unknown strategy");
    for (auto& sess : sc.sessions) sess.budgets = it->second;
}

/// Re-serializes a scenario (inline arrays); load(save(x)) == load-stable.
inline std::string save_config(const LoadedConfig& lc) {
    using nlohmann::json;
    const ScenarioData& sc = lc.scenario;
    json doc;
    doc["schema_version"] = 1;
    doc["grid"] = {{"periods", sc.grid.periods}, {"step_hours", sc.grid.step_hours}};
    doc["reserve"] = {{"activation_minutes", sc.reserve.activation_minutes}};
    json units;
    for (const auto& u : sc.dispatchable)
        units["dispatchable"].push_back({{"name", u.name}, {"p_max", u.p_max}, {"p_min", u.p_min},
                                         {"ramp_up", u.ramp_up}, {"ramp_down", u.ramp_down},
                                         {"min_up", u.min_up}, {"min_down", u.min_down},
                                         {"cost", u.cost}, {"initially_on", u.initially_on}});
    for (const auto& u : sc.non_dispatchable)
        units["non_dispatchable"].push_back({{"name", u.name},
                                             {"band", {{"lower", u.band.lower}, {"upper", u.band.upper}}},
                                             {"p_min", u.p_min}, {"ramp_up", u.ramp_up},
                                             {"ramp_down", u.ramp_down}, {"cost", u.cost}});
    for (const auto& u : sc.csp) {
        json c = {{"name", u.name}, {"p_max", u.p_max}, {"p_min", u.p_min},
                  {"turbine_eff", u.turbine_eff}, {"startup_loss", u.startup_loss},
                  {"sf_band", {{"lower", u.sf_band.lower}, {"upper", u.sf_band.upper}}},
                  {"ts_energy_max", u.ts_energy_max}, {"ts_energy_min", u.ts_energy_min},
                  {"ts_charge_eff", u.ts_charge_eff}, {"ts_discharge_eff", u.ts_discharge_eff},
                  {"ts_initial", u.ts_initial}, {"ramp_up", u.ramp_up},
                  {"ramp_down", u.ramp_down}, {"min_up", u.min_up}, {"min_down", u.min_down},
                  {"cost", u.cost}, {"initially_on", u.initially_on}};
        if (u.ts_charge_max) c["ts_charge_max"] = *u.ts_charge_max;
        if (u.ts_discharge_max) c["ts_discharge_max"] = *u.ts_discharge_max;
        units["csp"].push_back(std::move(c));
    }
    for (const auto& u : sc.flexible_demand) {
        json f = {{"name", u.name}, {"profiles", u.profiles},
                  {"flexibility_fraction", u.flexibility_fraction}, {"p_min", u.p_min},
                  {"p_max", u.p_max}, {"ramp_up", u.ramp_up}, {"ramp_down", u.ramp_down}};
        if (u.daily_energy_min) f["daily_energy_min"] = *u.daily_energy_min;
        units["flexible_demand"].push_back(std::move(f));
    }
    doc["units"] = std::move(units);
    json prices;
    auto pj = [](const PriceBand& p) {
        return json{{"nominal", p.nominal}, {"deviation", p.deviation}};
    };
    prices["dam"] = pj(sc.dam_price);
    prices["reserve_up"] = pj(sc.srm_up_price);
    prices["reserve_down"] = pj(sc.srm_down_price);
    for (const auto& b : sc.idm_prices) {
        json e = pj(b);
        e["session"] = b.idm_session;
        prices["idm"].push_back(std::move(e));
    }
    doc["prices"] = std::move(prices);
    json buds;
    for (const auto& [name, b] : sc.strategies) {
        json s;
        for (const auto& [f, g] : b.gamma) {
            switch (f.kind) {
                case FamilyId::DamPrice: s["dam_price"] = g; break;
                case FamilyId::SrmUpPrice: s["srm_up_price"] = g; break;
                case FamilyId::SrmDownPrice: s["srm_down_price"] = g; break;
                case FamilyId::IdmPrice: s["idm_price"][std::to_string(f.idm_session)] = g; break;
                case FamilyId::Ndrs: s["ndrs"][f.key] = g; break;
                case FamilyId::CspThermal: s["csp_thermal"][f.key] = g; break;
                case FamilyId::FdConsumption: s["fd"][f.key] = g; break;
            }
        }
        buds[name] = std::move(s);
    }
    doc["budgets"] = std::move(buds);
    json sess_arr = json::array();
    for (const auto& s : sc.sessions) {
        json e;
        e["kind"] = s.kind == SessionKind::DamSrmJoint ? "dam_srm"
                   : s.kind == SessionKind::SrmOnly    ? "srm"
                                                       : "idm";
        if (s.kind == SessionKind::Idm) e["idm_session"] = s.idm_session;
        e["window"] = {s.window_first, s.window_last};
        if (s.overlay) {
            json ov;
            if (s.overlay->narrow_bands > 0) ov["narrow_bands"] = s.overlay->narrow_bands;
            if (s.overlay->narrow_price_deviation > 0)
                ov["narrow_price_deviation"] = s.overlay->narrow_price_deviation;
            for (const auto& [n, b] : s.overlay->replace_bands)
                ov["replace_bands"][n] = {{"lower", b.lower}, {"upper", b.upper}};
            e["overlay"] = std::move(ov);
        }
        sess_arr.push_back(std::move(e));
    }
    doc["sessions"] = std::move(sess_arr);
    if (!sc.partition_groups.empty()) {
        json part;
        for (const auto& [g, m] : sc.partition_groups) part[g] = m;
        doc["partition"] = std::move(part);
    }
    doc["solver"] = {{"backend", lc.solver.backend}, {"mip_gap_rel", lc.solver.mip_gap_rel}};
    if (!lc.solver.external_cmd.empty()) doc["solver"]["external_cmd"] = lc.solver.external_cmd;
    doc["robust"] = {{"eps_rel", lc.robust.eps_rel}, {"max_iters", lc.robust.max_iters},
                     {"adversary_mode", lc.robust.adversary_mode}};
    if (lc.robust.slack_penalty > 0.0) doc["robust"]["slack_penalty"] = lc.robust.slack_penalty;
    return doc.dump(2) + "\n";
}

} // namespace rvpp
