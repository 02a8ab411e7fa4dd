#pragma once

// Generic mixed-integer linear program carrier. Rows are tagged with the
// constraint family they come from so reports and tests can group them.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace rvpp {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };
enum class RowSense { LE, GE, EQ };

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lb = 0.0, ub = kInf;
    double obj = 0.0;
};

struct MilpRow {
    std::string tag;
    RowSense sense = RowSense::LE;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> coeffs; // (var index, coefficient)
};

class MilpInstance {
public:
    std::string name = "model";
    bool maximize = true;

    int add_var(const std::string& name, double lb, double ub,
                VarKind kind = VarKind::Continuous, double obj = 0.0) {
        if (kind == VarKind::Binary) { lb = std::max(lb, 0.0); ub = std::min(ub, 1.0); }
        auto [it, inserted] = index_.emplace(name, (int)vars_.size());
        if (!inserted) throw std::runtime_error("duplicate variable: " + name);
        vars_.push_back({name, kind, lb, ub, obj});
        return it->second;
    }

    int add_row(const std::string& tag, RowSense sense, double rhs,
                std::vector<std::pair<int, double>> coeffs) {
        for (const auto& [j, c] : coeffs) {
            if (j < 0 || j >= (int)vars_.size())
                throw std::runtime_error("row " + tag + " references undeclared variable");
            (void)c;
        }
        // coalesce repeated variables so writers and solvers see each once
        std::sort(coeffs.begin(), coeffs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        size_t w = 0;
        for (size_t i = 0; i < coeffs.size(); ++i) {
            if (w > 0 && coeffs[w - 1].first == coeffs[i].first)
                coeffs[w - 1].second += coeffs[i].second;
            else
                coeffs[w++] = coeffs[i];
        }
        coeffs.resize(w);
        std::erase_if(coeffs, [](const auto& p) { return p.second == 0.0; });
        rows_.push_back({tag, sense, rhs, std::move(coeffs)});
        return (int)rows_.size() - 1;
    }

    void add_obj(int var, double coeff) { vars_[var].obj += coeff; }
    void set_bounds(int var, double lb, double ub) { vars_[var].lb = lb; vars_[var].ub = ub; }

    int find_var(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

    const std::vector<MilpVar>& vars() const { return vars_; }
    const std::vector<MilpRow>& rows() const { return rows_; }
    MilpRow& row(int i) { return rows_[i]; }
    const MilpRow& row(int i) const { return rows_[i]; }
    MilpVar& var(int j) { return vars_[j]; }
    const MilpVar& var(int j) const { return vars_[j]; }
    int num_vars() const { return (int)vars_.size(); }
    int num_rows() const { return (int)rows_.size(); }

    std::vector<int> binaries() const {
        std::vector<int> b;
        for (int j = 0; j < (int)vars_.size(); ++j)
            if (vars_[j].kind == VarKind::Binary) b.push_back(j);
        return b;
    }

    double objective_value(const std::vector<double>& x) const {
        double v = 0.0;
        for (int j = 0; j < (int)vars_.size(); ++j) v += vars_[j].obj * x[j];
        return v;
    }

    double row_activity(int i, const std::vector<double>& x) const {
        double a = 0.0;
        for (const auto& [j, c] : rows_[i].coeffs) a += c * x[j];
        return a;
    }

    /// Largest violation of any row or bound under x (positive = infeasible).
    double max_violation(const std::vector<double>& x) const {
        double worst = 0.0;
        for (int i = 0; i < (int)rows_.size(); ++i) {
            double a = row_activity(i, x);
            double viol = 0.0;
            switch (rows_[i].sense) {
                case RowSense::LE: viol = a - rows_[i].rhs; break;
                case RowSense::GE: viol = rows_[i].rhs - a; break;
                case RowSense::EQ: viol = std::abs(a - rows_[i].rhs); break;
            }
            worst = std::max(worst, viol);
        }
        for (int j = 0; j < (int)vars_.size(); ++j) {
            worst = std::max(worst, vars_[j].lb - x[j]);
            worst = std::max(worst, x[j] - vars_[j].ub);
        }
        return worst;
    }

private:
    std::vector<MilpVar> vars_;
    std::vector<MilpRow> rows_;
    std::map<std::string, int> index_;
};

/// Values pinned from previously cleared market sessions. Patterns are exact
/// variable names, or prefixes ending in '*'.
struct Fixings {
    std::vector<std::pair<std::string, double>> pins;

    void pin(const std::string& pattern, double value) {
        if (!std::isfinite(value)) throw std::runtime_error("non-finite fixing: " + pattern);
        pins.emplace_back(pattern, value);
    }
    bool empty() const { return pins.empty(); }
};

struct UnknownFixing : std::runtime_error {
    explicit UnknownFixing(const std::string& pattern)
        : std::runtime_error("fixing pattern matches no variable: " + pattern) {}
};

/// Pins each matched variable with an equality row tagged "Fix".
inline void apply_fixings(MilpInstance& m, const Fixings& fx) {
    for (const auto& [pattern, value] : fx.pins) {
        bool matched = false;
        if (!pattern.empty() && pattern.back() == '*') {
            const std::string prefix = pattern.substr(0, pattern.size() - 1);
            for (int j = 0; j < m.num_vars(); ++j)
                if (m.var(j).name.rfind(prefix, 0) == 0) {
                    m.add_row("Fix", RowSense::EQ, value, {{j, 1.0}});
                    matched = true;
                }
        } else {
            int j = m.find_var(pattern);
            if (j >= 0) {
                m.add_row("Fix", RowSense::EQ, value, {{j, 1.0}});
                matched = true;
            }
        }
        if (!matched) throw UnknownFixing(pattern);
    }
}

} // namespace rvpp
