#pragma once

// Uniform MILP solve contract over two backends: the bundled branch-and-bound
// and an external solver driven through MPS files and a subprocess. Every
// solution is re-verified against the instance before it is surfaced.

#include "branch_and_bound.hpp"
#include "milp.hpp"
#include "mps.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvpp {

enum class SolveStatus { Optimal, FeasibleGap, Infeasible, Unbounded, TimeLimit, Error };

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::FeasibleGap: return "FeasibleGap";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::Unbounded: return "Unbounded";
        case SolveStatus::TimeLimit: return "TimeLimit";
        case SolveStatus::Error: return "Error";
    }
    return "?";
}

struct SolveOptions {
    std::string backend = "bundled"; // bundled | external
    double mip_gap_rel = 1e-6;
    double time_limit_s = 0.0; // 0 = none
    std::string external_cmd;  // template with {mps} and {out}; falls back to RVPP_SOLVER_CMD
    double basis_tol = 1e-9;   // numeric tolerance for basis operations
    int64_t node_limit = 0;    // bundled backend; 0 = none
    double cutoff = -kInf;     // bundled backend; prune below this objective
    std::vector<std::pair<int, int8_t>> start_hint; // bundled: binary warm assignment
};

struct Solution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    double bound = 0.0; // best proven bound (maximize: upper)
    double gap = 0.0;
    std::vector<double> values;
    std::string message;

    bool feasible() const {
        return status == SolveStatus::Optimal || status == SolveStatus::FeasibleGap ||
               (status == SolveStatus::TimeLimit && !values.empty());
    }
};

struct ExternalSolverFailure : std::runtime_error {
    explicit ExternalSolverFailure(const std::string& w)
        : std::runtime_error("external solver failure: " + w) {}
};

struct NumericalBreakdown : std::runtime_error {
    explicit NumericalBreakdown(const std::string& w)
        : std::runtime_error("numerical breakdown: " + w) {}
};

/// Parses the adapter output: a status line, then "name value" pairs.
/// Variables not mentioned default to 0.
inline Solution parse_solution(const std::string& text, const MilpInstance& milp) {
    Solution sol;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    bool have_status = false;

    // the writer sanitizes names, so map sanitized -> index
    std::map<std::string, int> index;
    for (int j = 0; j < milp.num_vars(); ++j) index[mps_sanitize(milp.var(j).name)] = j;
    sol.values.assign(milp.num_vars(), 0.0);

    while (std::getline(is, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty() || toks[0][0] == '#') continue;
        if (!have_status) {
            const std::string& s = toks[0];
            if (s == "Optimal") sol.status = SolveStatus::Optimal;
            else if (s == "FeasibleGap") sol.status = SolveStatus::FeasibleGap;
            else if (s == "Infeasible") sol.status = SolveStatus::Infeasible;
            else if (s == "Unbounded") sol.status = SolveStatus::Unbounded;
            else if (s == "TimeLimit") sol.status = SolveStatus::TimeLimit;
            else if (s == "Error") sol.status = SolveStatus::Error;
            else throw MalformedLine(lineno, "unknown status " + s);
            have_status = true;
            continue;
        }
        if (toks.size() != 2) throw MalformedLine(lineno, "expected 'name value'");
        auto it = index.find(toks[0]);
        if (it == index.end()) throw MalformedLine(lineno, "unknown variable " + toks[0]);
        try { sol.values[it->second] = std::stod(toks[1]); }
        catch (...) { throw MalformedLine(lineno, "bad number " + toks[1]); }
    }
    if (!have_status) throw MalformedLine(1, "missing status line");
    sol.objective = milp.objective_value(sol.values);
    sol.bound = sol.objective;
    return sol;
}

namespace detail {

inline std::string default_external_cmd() {
    const char* env = std::getenv("RVPP_SOLVER_CMD");
    return env ? env : "";
}

inline std::string expand_cmd(std::string tpl, const std::string& mps, const std::string& out) {
    auto replace_all = [](std::string& s, const std::string& from, const std::string& to) {
        for (size_t p = 0; (p = s.find(from, p)) != std::string::npos; p += to.size())
            s.replace(p, from.size(), to);
    };
    replace_all(tpl, "{mps}", mps);
    replace_all(tpl, "{out}", out);
    return tpl;
}

} // namespace detail

inline Solution solve_external(const MilpInstance& milp, const SolveOptions& opt) {
    std::string tpl = opt.external_cmd.empty() ? detail::default_external_cmd() : opt.external_cmd;
    if (tpl.empty())
        throw ExternalSolverFailure("no command template (set RVPP_SOLVER_CMD or SolveOptions.external_cmd)");

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path();
    static std::atomic<uint64_t> counter{0};
    const std::string stamp = std::to_string(::getpid()) + "_" + std::to_string(counter++);
    const fs::path mps_path = dir / ("rvpp_" + stamp + ".mps");
    const fs::path out_path = dir / ("rvpp_" + stamp + ".sol");

    {
        std::ofstream f(mps_path);
        f << write_mps(milp);
        if (!f) throw ExternalSolverFailure("cannot write " + mps_path.string());
    }
    const std::string cmd = detail::expand_cmd(tpl, mps_path.string(), out_path.string());
    const int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::error_code ec;
        fs::remove(mps_path, ec);
        throw ExternalSolverFailure("command exited with " + std::to_string(rc) + ": " + cmd);
    }
    std::ifstream f(out_path);
    if (!f) throw ExternalSolverFailure("solver produced no output file " + out_path.string());
    std::stringstream buf;
    buf << f.rdbuf();
    Solution sol = parse_solution(buf.str(), milp);
    std::error_code ec;
    fs::remove(mps_path, ec);
    fs::remove(out_path, ec);
    return sol;
}

inline Solution solve_bundled(const MilpInstance& milp, const SolveOptions& opt) {
    if (milp.num_rows() > 10000 || milp.num_vars() > 8000)
        throw NumericalBreakdown("instance beyond bundled desk scale; use the external backend");
    BranchAndBound bnb(milp);
    BnbOptions bo;
    bo.gap_rel = opt.mip_gap_rel;
    bo.time_limit_s = opt.time_limit_s;
    bo.node_limit = opt.node_limit;
    bo.cutoff = opt.cutoff;
    bo.hint = opt.start_hint;
    BnbResult r = bnb.solve(bo);
    Solution sol;
    sol.objective = r.objective;
    sol.bound = r.bound;
    sol.gap = r.gap;
    sol.values = std::move(r.x);
    switch (r.status) {
        case BnbResult::Status::Optimal: sol.status = SolveStatus::Optimal; break;
        case BnbResult::Status::FeasibleGap: sol.status = SolveStatus::FeasibleGap; break;
        case BnbResult::Status::Infeasible: sol.status = SolveStatus::Infeasible; break;
        case BnbResult::Status::Unbounded: sol.status = SolveStatus::Unbounded; break;
        case BnbResult::Status::TimeLimit: sol.status = SolveStatus::TimeLimit; break;
        case BnbResult::Status::Error: sol.status = SolveStatus::Error; break;
    }
    return sol;
}

/// Checks a claimed-feasible solution against every row and bound; clamps
/// binaries that sit within integer tolerance.
inline void verify_solution(const MilpInstance& milp, Solution& sol, double tol = 1e-6) {
    if (!sol.feasible() || sol.values.empty()) return;
    for (int j = 0; j < milp.num_vars(); ++j) {
        if (milp.var(j).kind != VarKind::Binary) continue;
        double& v = sol.values[j];
        if (std::abs(v) <= tol) v = 0.0;
        else if (std::abs(v - 1.0) <= tol) v = 1.0;
        else {
            sol.status = SolveStatus::Error;
            sol.message = "binary " + milp.var(j).name + " fractional: " + std::to_string(v);
            return;
        }
    }
    const double viol = milp.max_violation(sol.values);
    if (viol > tol) {
        sol.status = SolveStatus::Error;
        sol.message = "solution violates rows by " + std::to_string(viol);
        return;
    }
    sol.objective = milp.objective_value(sol.values);
}

inline Solution solve(const MilpInstance& milp, const SolveOptions& opt = {}) {
    Solution sol = opt.backend == "external" ? solve_external(milp, opt) : solve_bundled(milp, opt);
    verify_solution(milp, sol);
    return sol;
}

} // namespace rvpp
