#pragma once

// Marginal-contribution profit allocation across technologies: each group is
// credited with the coalition-profit drop caused by its removal, normalized by
// capacity, and the aggregation surplus over standalone operation is shared in
// proportion to those normalized contributions. Budget balance is exact by
// construction. The profit oracle is the DAM+SRM robust solve.

#include "pipeline.hpp"
#include "robust.hpp"

namespace rvpp {

struct DegenerateWeights : std::runtime_error {
    explicit DegenerateWeights(const std::string& w) : std::runtime_error(w) {}
};

struct TechnologyPartition {
    std::map<std::string, std::vector<std::string>> groups; // name -> unit names
    std::map<std::string, double> capacity;                 // MW basis per group
};

/// Capacity basis: generators count their rated maximum; flexible demand
/// counts only the band it can actually shift, flexibility_fraction * p_max.
inline TechnologyPartition default_partition(const ScenarioData& sc) {
    TechnologyPartition p;
    p.groups = sc.partition_groups;
    if (p.groups.empty()) {
        for (const auto& u : sc.dispatchable) p.groups["D-RES"].push_back(u.name);
        for (const auto& u : sc.csp) p.groups["CSP"].push_back(u.name);
        for (const auto& u : sc.non_dispatchable) p.groups["ND-RES"].push_back(u.name);
        for (const auto& u : sc.flexible_demand) p.groups["FD"].push_back(u.name);
    }
    for (const auto& [g, members] : p.groups) {
        double cap = 0.0;
        for (const auto& name : members) {
            for (const auto& u : sc.dispatchable)
                if (u.name == name) cap += u.p_max;
            for (const auto& u : sc.csp)
                if (u.name == name) cap += u.p_max;
            for (const auto& u : sc.non_dispatchable)
                if (u.name == name) cap += u.p_max();
            for (const auto& u : sc.flexible_demand)
                if (u.name == name) cap += u.flexibility_fraction * u.p_max;
        }
        p.capacity[g] = cap;
    }
    return p;
}

/// Scenario restricted to a unit subset; budgets of removed units drop out.
inline ScenarioData subset_scenario(const ScenarioData& sc,
                                    const std::vector<std::string>& keep) {
    auto kept = [&](const std::string& n) {
        return std::find(keep.begin(), keep.end(), n) != keep.end();
    };
    ScenarioData out = sc;
    std::erase_if(out.dispatchable, [&](const auto& u) { return !kept(u.name); });
    std::erase_if(out.non_dispatchable, [&](const auto& u) { return !kept(u.name); });
    std::erase_if(out.csp, [&](const auto& u) { return !kept(u.name); });
    std::erase_if(out.flexible_demand, [&](const auto& u) { return !kept(u.name); });
    auto prune_budgets = [&](BudgetSet& b) {
        std::erase_if(b.gamma, [&](const auto& kv) {
            const FamilyId& f = kv.first;
            const bool unit_family = f.kind == FamilyId::Ndrs || f.kind == FamilyId::CspThermal ||
                                     f.kind == FamilyId::FdConsumption;
            return unit_family && !kept(f.key);
        });
    };
    for (auto& [name, b] : out.strategies) prune_budgets(b);
    for (auto& s : out.sessions) prune_budgets(s.budgets);
    for (auto& [g, members] : out.partition_groups)
        std::erase_if(members, [&](const std::string& n) { return !kept(n); });
    std::erase_if(out.partition_groups, [](const auto& kv) { return kv.second.empty(); });
    return out;
}

struct ProfitMap {
    double full = 0.0;
    std::map<std::string, double> without; // leave-one-out coalition profit
    std::map<std::string, double> solo;    // group alone as the whole plant
};

struct AllocationRow {
    double rho = 0.0;     // (full - without) / capacity
    double without = 0.0;
    double solo = 0.0;
    double allocated = 0.0;
};

struct AllocationReport {
    double full = 0.0;
    double delta_pi = 0.0; // aggregation surplus
    std::map<std::string, AllocationRow> rows;
};

namespace detail {
inline const SessionSpec& dam_srm_session(const ScenarioData& sc) {
    for (const auto& s : sc.sessions)
        if (s.kind == SessionKind::DamSrmJoint) return s;
    throw std::runtime_error("scenario has no DAM+SRM session");
}
} // namespace detail

/// Robust DAM+SRM coalition profit (certified worst case).
inline double coalition_profit(const ScenarioData& sc, const RobustOptions& ropt,
                               const SolveOptions& sopt) {
    const SessionSpec& sess = detail::dam_srm_session(sc);
    return ccg_solve(sc, sess, ropt, sopt).worst_profit;
}

/// Full, leave-one-out and solo profits for every group of the partition.
/// Per-solve failures are annotated with the coalition that failed.
inline ProfitMap profit_suite(const ScenarioData& sc, const TechnologyPartition& part,
                              const RobustOptions& ropt = {}, const SolveOptions& sopt = {}) {
    ProfitMap pm;
    auto run = [&](const ScenarioData& s, const std::string& which) {
        try {
            return coalition_profit(s, ropt, sopt);
        } catch (const std::exception& e) {
            throw std::runtime_error("coalition '" + which + "': " + e.what());
        }
    };
    pm.full = run(sc, "full");
    std::vector<std::string> all;
    for (const auto& [g, members] : part.groups)
        all.insert(all.end(), members.begin(), members.end());
    for (const auto& [g, members] : part.groups) {
        std::vector<std::string> rest;
        for (const auto& n : all)
            if (std::find(members.begin(), members.end(), n) == members.end()) rest.push_back(n);
        pm.without[g] = rest.empty() ? 0.0 : run(subset_scenario(sc, rest), "without " + g);
        pm.solo[g] = run(subset_scenario(sc, members), "solo " + g);
    }
    return pm;
}

/// Pure allocation arithmetic; throws DegenerateWeights when the weight mass
/// is not positive.
inline AllocationReport marginal_contribution(const ProfitMap& pm,
                                              const TechnologyPartition& part) {
    AllocationReport rep;
    rep.full = pm.full;
    double solo_sum = 0.0, weight_sum = 0.0;
    for (const auto& [g, members] : part.groups) {
        (void)members;
        AllocationRow row;
        row.without = pm.without.at(g);
        row.solo = pm.solo.at(g);
        const double cap = part.capacity.at(g);
        if (cap <= 0.0) throw DegenerateWeights("group " + g + " has nonpositive capacity");
        row.rho = (pm.full - row.without) / cap;
        weight_sum += row.rho * cap;
        solo_sum += row.solo;
        rep.rows.emplace(g, row);
    }
    rep.delta_pi = pm.full - solo_sum;
    if (weight_sum <= 0.0)
        throw DegenerateWeights("sum of rho*P is " + std::to_string(weight_sum));
    for (auto& [g, row] : rep.rows) {
        const double w = row.rho * part.capacity.at(g) / weight_sum;
        row.allocated = row.solo + w * rep.delta_pi;
    }
    return rep;
}

} // namespace rvpp
