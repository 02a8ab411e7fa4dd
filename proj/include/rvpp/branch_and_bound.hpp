#pragma once

// Best-first branch and bound over the bundled simplex. The tree shares one
// SimplexLp instance: every node stores only its branching path, bounds are
// re-applied from the root on each pop, and the previous basis re-optimizes
// with the dual simplex (bound changes never break dual feasibility).
// Branching picks the most fractional binary; a rounding dive supplies early
// incumbents. Deterministic: node ids break all priority ties.

#include "milp.hpp"
#include "simplex.hpp"

#include <chrono>
#include <cstdint>
#include <queue>
#include <vector>

namespace rvpp {

struct BnbOptions {
    double gap_rel = 1e-6;
    double time_limit_s = 0.0;  // 0 = none
    int64_t node_limit = 0;     // 0 = none
    double cutoff = -kInf;      // prune nodes with bound <= cutoff (maximize)
    std::vector<std::pair<int, int8_t>> hint; // binary assignment to dive on first
};

struct BnbResult {
    enum class Status { Optimal, FeasibleGap, Infeasible, Unbounded, TimeLimit, Error };
    Status status = Status::Error;
    double objective = -kInf; // best incumbent value
    double bound = kInf;      // best proven upper bound
    double gap = kInf;
    std::vector<double> x;    // structural values of the incumbent
    int64_t nodes = 0;
};

class BranchAndBound {
public:
    explicit BranchAndBound(const MilpInstance& milp)
        : milp_(milp), lp_(milp), bins_(milp.binaries()) {}

    BnbResult solve(const BnbOptions& opt = {}) {
        using clock = std::chrono::steady_clock;
        const auto t0 = clock::now();
        auto out_of_time = [&] {
            return opt.time_limit_s > 0.0 &&
                   std::chrono::duration<double>(clock::now() - t0).count() > opt.time_limit_s;
        };

        BnbResult res;
        lp_.restore_root_bounds();
        LpStatus st = lp_.solve_primal();
        ++res.nodes;
        if (st == LpStatus::Infeasible) { res.status = BnbResult::Status::Infeasible; res.gap = 0.0; return res; }
        if (st == LpStatus::Unbounded) { res.status = BnbResult::Status::Unbounded; return res; }
        if (st != LpStatus::Optimal) { res.status = BnbResult::Status::Error; return res; }

        double incumbent = -kInf;
        std::vector<double> best_x;
        const double root_bound = lp_.objective();

        if (!opt.hint.empty() && !bins_.empty()) {
            std::vector<double> hx;
            double hval;
            if (dive(opt.hint, std::max(opt.cutoff, -kInf), hval, hx)) {
                incumbent = hval;
                best_x = std::move(hx);
            }
        }

        auto cutoff_for = [&](double inc) {
            return std::max(inc + opt.gap_rel * std::max(1.0, std::abs(inc)), opt.cutoff);
        };

        if (bins_.empty()) {
            res.status = BnbResult::Status::Optimal;
            res.objective = res.bound = root_bound;
            res.gap = 0.0;
            res.x = structural_values();
            return res;
        }

        struct Node {
            double priority;
            int64_t id;
            std::vector<std::pair<int, int8_t>> fixes;
        };
        struct Cmp {
            bool operator()(const Node& a, const Node& b) const {
                if (a.priority != b.priority) return a.priority < b.priority;
                return a.id > b.id; // older first
            }
        };
        std::priority_queue<Node, std::vector<Node>, Cmp> open;
        int64_t next_id = 0;
        open.push({root_bound, next_id++, {}});

        double global_ub = root_bound;
        int64_t since_incumbent = 0;
        bool timed_out = false, node_capped = false;

        while (!open.empty()) {
            if (out_of_time()) { timed_out = true; break; }
            if (opt.node_limit > 0 && res.nodes >= opt.node_limit) { node_capped = true; break; }

            Node node = open.top();
            open.pop();
            global_ub = node.priority;
            if (node.priority <= cutoff_for(incumbent)) { global_ub = std::max(incumbent, opt.cutoff); break; }

            apply_fixes(node.fixes);
            st = lp_.solve();
            ++res.nodes;
            if (st == LpStatus::Infeasible) continue;
            if (st != LpStatus::Optimal) { res.status = BnbResult::Status::Error; return res; }
            const double val = lp_.objective();
            if (val <= cutoff_for(incumbent)) continue;

            int frac = most_fractional();
            if (frac < 0) {
                // candidate incumbent: guard against basis drift before accepting
                if (lp_.ensure_accuracy() != LpStatus::Optimal) continue;
                const double vval = lp_.objective();
                frac = most_fractional();
                if (frac < 0) {
                    if (vval > incumbent) {
                        incumbent = vval;
                        best_x = structural_values();
                    }
                    since_incumbent = 0;
                    continue;
                }
                if (vval <= cutoff_for(incumbent)) continue;
            }
            const double branch_val = lp_.value(frac);

            if (incumbent == -kInf || ++since_incumbent >= 256) {
                since_incumbent = 0;
                std::vector<double> dive_x;
                double dive_val;
                if (dive(node.fixes, cutoff_for(incumbent), dive_val, dive_x) && dive_val > incumbent) {
                    incumbent = dive_val;
                    best_x = std::move(dive_x);
                }
            }

            auto kids = node.fixes;
            kids.emplace_back(frac, (int8_t)(branch_val >= 0.5 ? 1 : 0));
            open.push({val, next_id++, kids});
            kids.back().second = (int8_t)(branch_val >= 0.5 ? 0 : 1);
            open.push({val, next_id++, std::move(kids)});
        }

        if (!open.empty()) global_ub = std::max(global_ub, open.top().priority);
        else if (!timed_out && !node_capped) global_ub = std::max(incumbent, opt.cutoff);

        res.objective = incumbent;
        res.bound = global_ub;
        res.x = std::move(best_x);
        if (incumbent == -kInf) {
            if (timed_out) { res.status = BnbResult::Status::TimeLimit; return res; }
            res.status = BnbResult::Status::Infeasible;
            res.gap = 0.0;
            return res;
        }
        res.gap = (global_ub - incumbent) / std::max(1.0, std::abs(incumbent));
        if (res.gap < 0.0) res.gap = 0.0;
        if (timed_out) res.status = BnbResult::Status::TimeLimit;
        else if (node_capped && res.gap > opt.gap_rel * 1.0000001)
            res.status = BnbResult::Status::FeasibleGap;
        else res.status = BnbResult::Status::Optimal;
        return res;
    }

private:
    const MilpInstance& milp_;
    SimplexLp lp_;
    std::vector<int> bins_;

    void apply_fixes(const std::vector<std::pair<int, int8_t>>& fixes) {
        lp_.restore_root_bounds();
        for (const auto& [j, v] : fixes) lp_.set_var_bounds(j, (double)v, (double)v);
    }

    std::vector<double> structural_values() const {
        std::vector<double> x(lp_.num_structural());
        for (int j = 0; j < (int)x.size(); ++j) x[j] = lp_.value(j);
        return x;
    }

    int most_fractional() const {
        int best = -1;
        double best_frac = 1e-6;
        for (int j : bins_) {
            const double v = lp_.value(j);
            const double f = std::min(v, 1.0 - v); // distance to the nearest of {0,1}
            if (f > best_frac + 1e-12) { best = j; best_frac = f; }
        }
        return best;
    }

    /// Rounds binaries one at a time toward the current LP value, re-solving
    /// after each fix. Returns true with an integral feasible point on
    /// success.
    bool dive(std::vector<std::pair<int, int8_t>> fixes, double cutoff, double& val,
              std::vector<double>& x) {
        apply_fixes(fixes);
        if (lp_.solve() != LpStatus::Optimal) return false;
        for (size_t guard = 0; guard <= bins_.size() + 1; ++guard) {
            if (lp_.objective() <= cutoff) return false;
            const int j = most_fractional();
            if (j < 0) {
                if (lp_.ensure_accuracy() != LpStatus::Optimal) return false;
                if (most_fractional() >= 0) continue; // re-round after the repair
                val = lp_.objective();
                x = structural_values();
                return true;
            }
            const int8_t want = (int8_t)(lp_.value(j) >= 0.5 ? 1 : 0);
            fixes.emplace_back(j, want);
            apply_fixes(fixes);
            if (lp_.solve() != LpStatus::Optimal) {
                fixes.back().second = (int8_t)(1 - want);
                apply_fixes(fixes);
                if (lp_.solve() != LpStatus::Optimal) return false;
            }
        }
        return false;
    }
};

} // namespace rvpp
