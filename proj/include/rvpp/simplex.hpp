#pragma once

// Dense bounded-variable simplex over a MilpInstance's LP relaxation.
//
// Rows are equalities against logical slack columns whose bounds encode the
// sense (LE -> s >= 0, GE -> s <= 0, EQ -> s fixed at 0). The basis inverse is
// kept explicitly (column-major) with product-form updates; refactorization is
// driven by a residual check rather than a fixed schedule. Cold solves run the
// classic two phases; bound or rhs changes leave the basis dual feasible, so
// re-optimization uses the dual simplex. Pricing is Dantzig with a Bland
// fallback on degeneracy streaks, and every tie-break is by lowest index, so
// repeated solves of the same instance are bit-identical.

#include "milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace rvpp {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit, Singular };

class SimplexLp {
public:
    explicit SimplexLp(const MilpInstance& milp) : n_(milp.num_vars()), m_(milp.num_rows()) {
        cols_.resize(n_);
        lb_.assign(n_ + m_, 0.0);
        ub_.assign(n_ + m_, 0.0);
        obj_.assign(n_ + m_, 0.0);
        b_.assign(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = milp.var(j).lb;
            ub_[j] = milp.var(j).ub;
            obj_[j] = milp.maximize ? milp.var(j).obj : -milp.var(j).obj;
        }
        for (int i = 0; i < m_; ++i) {
            const MilpRow& r = milp.row(i);
            b_[i] = r.rhs;
            for (const auto& [j, c] : r.coeffs)
                if (c != 0.0) cols_[j].emplace_back(i, c);
            const int s = n_ + i;
            switch (r.sense) {
                case RowSense::LE: lb_[s] = 0.0; ub_[s] = kInf; break;
                case RowSense::GE: lb_[s] = -kInf; ub_[s] = 0.0; break;
                case RowSense::EQ: lb_[s] = 0.0; ub_[s] = 0.0; break;
            }
        }
        root_lb_ = lb_;
        root_ub_ = ub_;
        reset_to_slack_basis();
    }

    int num_structural() const { return n_; }
    int num_rows() const { return m_; }

    void set_var_bounds(int j, double lo, double hi) { lb_[j] = lo; ub_[j] = hi; }
    void set_row_rhs(int i, double v) { b_[i] = v; }
    double row_rhs(int i) const { return b_[i]; }
    void restore_root_bounds() {
        std::copy(root_lb_.begin(), root_lb_.begin() + n_, lb_.begin());
        std::copy(root_ub_.begin(), root_ub_.begin() + n_, ub_.begin());
    }
    double var_lb(int j) const { return lb_[j]; }
    double var_ub(int j) const { return ub_[j]; }

    /// Re-optimizes with the dual simplex when a previously optimal basis is
    /// at hand, otherwise runs a cold two-phase primal solve.
    LpStatus solve(int64_t iter_limit = 0) {
        if (iter_limit <= 0) iter_limit = default_iter_limit();
        iterations_ = 0;
        if (ever_optimized_ && factorized_) {
            snap_nonbasic_to_bounds();
            if (repair_dual_feasibility()) {
                compute_basics();
                LpStatus st = dual_simplex(iter_limit);
                if (st == LpStatus::Optimal) {
                    // the incremental reduced costs may have drifted: polish
                    // with exactly priced primal iterations (no-op when the
                    // basis is truly optimal)
                    st = primal_loop(false, iter_limit);
                    if (st == LpStatus::Optimal) return st;
                } else if (st == LpStatus::Infeasible) {
                    // confirm with honestly priced phase-1 from this basis
                    st = primal_loop(true, iter_limit);
                    if (st == LpStatus::Infeasible) return LpStatus::Infeasible;
                    if (st == LpStatus::Optimal && max_primal_infeas() > kFeasTol * 10)
                        return LpStatus::Infeasible;
                    if (st == LpStatus::Optimal) {
                        st = primal_loop(false, iter_limit);
                        if (st == LpStatus::Optimal) return st;
                    }
                }
                // fall through to a cold restart on Singular/IterLimit
            }
        }
        return recover_cold(iter_limit);
    }

    LpStatus solve_primal(int64_t iter_limit = 0) {
        if (iter_limit <= 0) iter_limit = default_iter_limit();
        iterations_ = 0;
        return recover_cold(iter_limit);
    }

    double objective() const {
        double v = 0.0;
        for (int j = 0; j < n_; ++j) v += obj_[j] * x_[j];
        return v;
    }

    /// Residual-checks the current iterate; on drift, refactorizes and
    /// re-optimizes. Returns the (possibly re-established) status.
    LpStatus ensure_accuracy(double tol = 1e-8) {
        if (residual_drift() <= tol) return LpStatus::Optimal;
        if (!refactorize()) return recover_cold(default_iter_limit());
        snap_nonbasic_to_bounds();
        compute_basics();
        LpStatus st = primal_loop(true, default_iter_limit());
        if (st != LpStatus::Optimal) return st;
        if (max_primal_infeas() > kFeasTol * 10) return LpStatus::Infeasible;
        return primal_loop(false, default_iter_limit());
    }
    double value(int j) const { return x_[j]; }
    int64_t iterations() const { return iterations_; }

    /// Row duals of the current basis (marginal value of one unit of rhs in
    /// the maximize objective).
    std::vector<double> row_duals() const {
        std::vector<double> y;
        btran_cost(y);
        return y;
    }

private:
    static constexpr double kFeasTol = 1e-7;
    static constexpr double kOptTol = 1e-8;
    static constexpr double kPivotTol = 1e-9;

    enum VStat : uint8_t { AtLower, AtUpper, Basic, FreeNb };

    int n_, m_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lb_, ub_, obj_, b_;
    std::vector<double> root_lb_, root_ub_;

    std::vector<int> basic_;
    std::vector<VStat> stat_;
    std::vector<double> x_;
    std::vector<double> binv_; // column-major m x m
    bool factorized_ = false;
    bool ever_optimized_ = false;
    int updates_since_refactor_ = 0;
    int64_t iterations_ = 0;

    int64_t default_iter_limit() const { return 10000 + 20LL * (n_ + m_); }

    void reset_to_slack_basis() {
        basic_.resize(m_);
        stat_.assign(n_ + m_, AtLower);
        x_.assign(n_ + m_, 0.0);
        for (int j = 0; j < n_ + m_; ++j) {
            if (std::isfinite(lb_[j])) { stat_[j] = AtLower; x_[j] = lb_[j]; }
            else if (std::isfinite(ub_[j])) { stat_[j] = AtUpper; x_[j] = ub_[j]; }
            else { stat_[j] = FreeNb; x_[j] = 0.0; }
        }
        for (int i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            stat_[n_ + i] = Basic;
        }
        factorized_ = false;
        ever_optimized_ = false;
    }

    LpStatus recover_cold(int64_t iter_limit) {
        if (!factorized_ && !refactorize()) {
            reset_to_slack_basis();
            if (!refactorize()) return LpStatus::Singular;
        }
        snap_nonbasic_to_bounds();
        compute_basics();
        LpStatus st = primal_loop(/*phase1=*/true, iter_limit);
        if (st == LpStatus::Singular) {
            reset_to_slack_basis();
            if (!refactorize()) return LpStatus::Singular;
            snap_nonbasic_to_bounds();
            compute_basics();
            st = primal_loop(true, iter_limit);
            if (st != LpStatus::Optimal) return st;
        } else if (st != LpStatus::Optimal) {
            return st;
        }
        if (max_primal_infeas() > kFeasTol * 10) return LpStatus::Infeasible;
        st = primal_loop(/*phase1=*/false, iter_limit);
        if (st == LpStatus::Optimal) ever_optimized_ = true;
        return st;
    }

    /// Bound changes (branching, budget swaps) can leave a nonbasic variable
    /// whose reduced cost has the wrong sign for its status, e.g. after a
    /// fixed binary is released. Flipping it to its other bound restores dual
    /// feasibility; returns false when that is impossible (free variable with
    /// a nonzero reduced cost), in which case the caller solves cold.
    bool repair_dual_feasibility() {
        std::vector<double> y;
        btran_cost(y);
        for (int j = 0; j < n_ + m_; ++j) {
            if (stat_[j] == Basic || lb_[j] == ub_[j]) continue;
            const double d = obj_[j] - dot_col(j, y);
            if (stat_[j] == AtLower && d > kOptTol) {
                if (!std::isfinite(ub_[j])) return false;
                stat_[j] = AtUpper;
                x_[j] = ub_[j];
            } else if (stat_[j] == AtUpper && d < -kOptTol) {
                if (!std::isfinite(lb_[j])) return false;
                stat_[j] = AtLower;
                x_[j] = lb_[j];
            } else if (stat_[j] == FreeNb && std::abs(d) > kOptTol) {
                return false;
            }
        }
        return true;
    }

    void snap_nonbasic_to_bounds() {
        for (int j = 0; j < n_ + m_; ++j) {
            if (stat_[j] == Basic) continue;
            if (stat_[j] == AtLower && !std::isfinite(lb_[j]))
                stat_[j] = std::isfinite(ub_[j]) ? AtUpper : FreeNb;
            else if (stat_[j] == AtUpper && !std::isfinite(ub_[j]))
                stat_[j] = std::isfinite(lb_[j]) ? AtLower : FreeNb;
            if (stat_[j] == AtLower) x_[j] = lb_[j];
            else if (stat_[j] == AtUpper) x_[j] = ub_[j];
            else x_[j] = 0.0;
        }
    }

    // --- linear algebra ------------------------------------------------------

    const double* binv_col(int j) const { return &binv_[(size_t)j * m_]; }
    double* binv_col(int j) { return &binv_[(size_t)j * m_]; }

    void ftran(int q, std::vector<double>& w) const {
        w.assign(m_, 0.0);
        if (q >= n_) {
            const double* col = binv_col(q - n_);
            std::copy(col, col + m_, w.begin());
        } else {
            for (const auto& [r, v] : cols_[q]) {
                const double* col = binv_col(r);
                for (int i = 0; i < m_; ++i) w[i] += v * col[i];
            }
        }
    }

    void btran(const std::vector<double>& cb, std::vector<double>& y) const {
        y.assign(m_, 0.0);
        for (int j = 0; j < m_; ++j) {
            const double* col = binv_col(j);
            double s = 0.0;
            for (int i = 0; i < m_; ++i) s += cb[i] * col[i];
            y[j] = s;
        }
    }

    void btran_cost(std::vector<double>& y) const {
        std::vector<double> cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = obj_[basic_[i]];
        btran(cb, y);
    }

    void binv_row(int r, std::vector<double>& rho) const {
        rho.resize(m_);
        for (int j = 0; j < m_; ++j) rho[j] = binv_[(size_t)j * m_ + r];
    }

    double dot_col(int q, const std::vector<double>& y) const {
        if (q >= n_) return y[q - n_];
        double s = 0.0;
        for (const auto& [r, v] : cols_[q]) s += v * y[r];
        return s;
    }

    bool update_basis(int r, int q, const std::vector<double>& w) {
        const double piv = w[r];
        if (std::abs(piv) < kPivotTol) return false;
        const double inv_piv = 1.0 / piv;
        for (int j = 0; j < m_; ++j) {
            double* col = binv_col(j);
            const double pr = col[r] * inv_piv;
            if (pr == 0.0) continue;
            for (int i = 0; i < m_; ++i) col[i] -= pr * w[i];
            col[r] = pr;
        }
        basic_[r] = q;
        ++updates_since_refactor_;
        if ((updates_since_refactor_ & 63) == 0 && residual_drift() > 1e-9) {
            if (!refactorize()) return false;
            compute_basics();
        }
        return true;
    }

    /// Residual of the current iterate against the rows, scaled.
    double residual_drift() const {
        std::vector<double> act(m_, 0.0);
        double scale = 1.0;
        for (int j = 0; j < n_; ++j) {
            const double xj = x_[j];
            if (xj == 0.0) continue;
            scale = std::max(scale, std::abs(xj));
            for (const auto& [r, v] : cols_[j]) act[r] += v * xj;
        }
        double worst = 0.0;
        for (int i = 0; i < m_; ++i)
            worst = std::max(worst, std::abs(act[i] + x_[n_ + i] - b_[i]));
        return worst / scale;
    }

    bool refactorize() {
        // Gauss-Jordan with partial pivoting on row-major scratch copies.
        std::vector<double> a((size_t)m_ * m_, 0.0);   // row-major basis matrix
        std::vector<double> inv((size_t)m_ * m_, 0.0); // row-major inverse
        for (int slot = 0; slot < m_; ++slot) {
            const int q = basic_[slot];
            if (q >= n_) a[(size_t)(q - n_) * m_ + slot] = 1.0;
            else
                for (const auto& [r, v] : cols_[q]) a[(size_t)r * m_ + slot] = v;
        }
        for (int i = 0; i < m_; ++i) inv[(size_t)i * m_ + i] = 1.0;
        for (int k = 0; k < m_; ++k) {
            int piv = -1;
            double best = kPivotTol;
            for (int i = k; i < m_; ++i) {
                const double v = std::abs(a[(size_t)i * m_ + k]);
                if (v > best) { best = v; piv = i; }
            }
            if (piv < 0) { factorized_ = false; return false; }
            if (piv != k) {
                for (int j = 0; j < m_; ++j) {
                    std::swap(a[(size_t)k * m_ + j], a[(size_t)piv * m_ + j]);
                    std::swap(inv[(size_t)k * m_ + j], inv[(size_t)piv * m_ + j]);
                }
            }
            double* ak = &a[(size_t)k * m_];
            double* ik = &inv[(size_t)k * m_];
            const double f = 1.0 / ak[k];
            for (int j = 0; j < m_; ++j) { ak[j] *= f; ik[j] *= f; }
            ak[k] = 1.0;
            for (int i = 0; i < m_; ++i) {
                if (i == k) continue;
                double* ai = &a[(size_t)i * m_];
                const double g = ai[k];
                if (g == 0.0) continue;
                double* ii = &inv[(size_t)i * m_];
                for (int j = 0; j < m_; ++j) { ai[j] -= g * ak[j]; ii[j] -= g * ik[j]; }
                ai[k] = 0.0;
            }
        }
        // inv rows are B^-1 rows in basis-slot order; x_B[slot] = row slot . rhs.
        // Store column-major: binv_[j*m + i] = inv[i][j].
        binv_.resize((size_t)m_ * m_);
        for (int i = 0; i < m_; ++i)
            for (int j = 0; j < m_; ++j) binv_[(size_t)j * m_ + i] = inv[(size_t)i * m_ + j];
        factorized_ = true;
        updates_since_refactor_ = 0;
        return true;
    }

    void compute_basics() {
        std::vector<double> rhs(b_);
        for (int j = 0; j < n_ + m_; ++j) {
            if (stat_[j] == Basic || x_[j] == 0.0) continue;
            if (j >= n_) rhs[j - n_] -= x_[j];
            else
                for (const auto& [r, v] : cols_[j]) rhs[r] -= v * x_[j];
        }
        std::vector<double> xb(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            const double f = rhs[r];
            if (f == 0.0) continue;
            const double* col = binv_col(r);
            for (int i = 0; i < m_; ++i) xb[i] += f * col[i];
        }
        for (int i = 0; i < m_; ++i) x_[basic_[i]] = xb[i];
    }

    double max_primal_infeas() const {
        double worst = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int j = basic_[i];
            worst = std::max(worst, lb_[j] - x_[j]);
            worst = std::max(worst, x_[j] - ub_[j]);
        }
        return worst;
    }

    // --- primal simplex ------------------------------------------------------

    LpStatus primal_loop(bool phase1, int64_t iter_limit) {
        std::vector<double> y, w, cb(m_);
        int degen_streak = 0;
        bool bland = false;
        int64_t local_iters = 0;
        while (true) {
            ++iterations_;
            if (++local_iters > iter_limit) return LpStatus::IterLimit;
            if (phase1 && max_primal_infeas() <= kFeasTol) return LpStatus::Optimal;

            if (phase1) {
                for (int i = 0; i < m_; ++i) {
                    const int j = basic_[i];
                    if (x_[j] < lb_[j] - kFeasTol) cb[i] = 1.0;
                    else if (x_[j] > ub_[j] + kFeasTol) cb[i] = -1.0;
                    else cb[i] = 0.0;
                }
                btran(cb, y);
            } else {
                btran_cost(y);
            }

            int q = -1, dir = 0;
            const double tol = phase1 ? 1e-8 : kOptTol;
            double best = tol;
            for (int j = 0; j < n_ + m_; ++j) {
                if (stat_[j] == Basic || lb_[j] == ub_[j]) continue;
                const double d = (phase1 ? 0.0 : obj_[j]) - dot_col(j, y);
                int cd = 0;
                if (stat_[j] == AtLower) { if (d > best) cd = 1; }
                else if (stat_[j] == AtUpper) { if (d < -best) cd = -1; }
                else { if (std::abs(d) > best) cd = d > 0 ? 1 : -1; }
                if (cd != 0) {
                    q = j; dir = cd;
                    if (bland) break;
                    best = std::abs(d);
                }
            }
            if (q < 0) return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;

            ftran(q, w);

            double limit = ub_[q] - lb_[q]; // own span -> bound flip
            int leave = -1, leave_target = 0;
            double leave_pivot = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double wi = w[i];
                if (std::abs(wi) < kPivotTol) continue;
                const int j = basic_[i];
                const double move = -dir * wi; // change of x_Bi per unit of x_q
                double cap;
                int target;
                if (move > 0) {
                    if (phase1 && x_[j] < lb_[j] - kFeasTol) { cap = lb_[j]; target = 0; }
                    else if (x_[j] > ub_[j] + kFeasTol) continue; // already above, rising
                    else if (std::isfinite(ub_[j])) { cap = ub_[j]; target = 1; }
                    else continue;
                } else {
                    if (phase1 && x_[j] > ub_[j] + kFeasTol) { cap = ub_[j]; target = 1; }
                    else if (x_[j] < lb_[j] - kFeasTol) continue; // already below, falling
                    else if (std::isfinite(lb_[j])) { cap = lb_[j]; target = 0; }
                    else continue;
                }
                double room = (cap - x_[j]) / move;
                if (room < 0.0) room = 0.0;
                const bool strictly_better = room < limit - 1e-9;
                const bool tie = !strictly_better && room < limit + 1e-9;
                if (strictly_better || (tie && leave >= 0 && std::abs(wi) > std::abs(leave_pivot))) {
                    limit = std::min(limit, room);
                    leave = i;
                    leave_target = target;
                    leave_pivot = wi;
                }
            }

            if (leave < 0) {
                if (!std::isfinite(limit))
                    return phase1 ? LpStatus::Infeasible : LpStatus::Unbounded;
                x_[q] += dir * limit;
                stat_[q] = dir > 0 ? AtUpper : AtLower;
                for (int i = 0; i < m_; ++i) x_[basic_[i]] -= dir * limit * w[i];
                continue;
            }

            if (limit <= 1e-11) { if (++degen_streak > 150) bland = true; }
            else { degen_streak = 0; bland = false; }

            const int lj = basic_[leave];
            x_[q] += dir * limit;
            for (int i = 0; i < m_; ++i) x_[basic_[i]] -= dir * limit * w[i];
            x_[lj] = leave_target == 0 ? lb_[lj] : ub_[lj];
            stat_[lj] = leave_target == 0 ? AtLower : AtUpper;
            stat_[q] = Basic;
            if (!update_basis(leave, q, w)) return LpStatus::Singular;
            if (updates_since_refactor_ == 0) compute_basics();
        }
    }

    // --- dual simplex --------------------------------------------------------

    LpStatus dual_simplex(int64_t iter_limit) {
        std::vector<double> y, rho, w;
        std::vector<double> d(n_ + m_, 0.0), alpha(n_ + m_, 0.0);
        btran_cost(y);
        for (int j = 0; j < n_ + m_; ++j)
            d[j] = stat_[j] == Basic ? 0.0 : obj_[j] - dot_col(j, y);
        int degen_streak = 0;
        bool bland = false;
        int64_t local_iters = 0;

        while (true) {
            ++iterations_;
            if (++local_iters > iter_limit) return LpStatus::IterLimit;

            int r = -1;
            bool below = false;
            if (!bland) {
                double worst = kFeasTol;
                for (int i = 0; i < m_; ++i) {
                    const int j = basic_[i];
                    const double lo = lb_[j] - x_[j], hi = x_[j] - ub_[j];
                    if (lo > worst) { worst = lo; r = i; below = true; }
                    if (hi > worst) { worst = hi; r = i; below = false; }
                }
            } else {
                for (int i = 0; i < m_; ++i) {
                    const int j = basic_[i];
                    if (lb_[j] - x_[j] > kFeasTol) { r = i; below = true; break; }
                    if (x_[j] - ub_[j] > kFeasTol) { r = i; below = false; break; }
                }
            }
            if (r < 0) return LpStatus::Optimal;

            binv_row(r, rho);
            int q = -1, dir_q = 0;
            double best_ratio = kInf, best_alpha = 0.0;
            for (int j = 0; j < n_ + m_; ++j) {
                if (stat_[j] == Basic || lb_[j] == ub_[j]) { alpha[j] = 0.0; continue; }
                const double aj = dot_col(j, rho);
                alpha[j] = aj;
                if (std::abs(aj) < kPivotTol) continue;
                int dj = 0;
                if (stat_[j] == FreeNb) {
                    dj = below ? (aj < 0 ? 1 : -1) : (aj > 0 ? 1 : -1);
                } else if (below) {
                    if (stat_[j] == AtLower && aj < 0) dj = 1;
                    else if (stat_[j] == AtUpper && aj > 0) dj = -1;
                    else continue;
                } else {
                    if (stat_[j] == AtLower && aj > 0) dj = 1;
                    else if (stat_[j] == AtUpper && aj < 0) dj = -1;
                    else continue;
                }
                const double ratio = std::abs(d[j]) / std::abs(aj);
                bool take;
                if (bland) take = q < 0;
                else
                    take = ratio < best_ratio - 1e-12 ||
                           (ratio < best_ratio + 1e-12 &&
                            std::abs(aj) > std::abs(best_alpha) + 1e-12);
                if (take) { q = j; dir_q = dj; best_ratio = ratio; best_alpha = aj; }
            }
            if (q < 0) return LpStatus::Infeasible; // dual unbounded
            (void)dir_q;

            ftran(q, w);
            if (std::abs(w[r]) < kPivotTol) {
                // numerically unusable pivot: refactor and retry once
                if (!refactorize()) return LpStatus::Singular;
                compute_basics();
                btran_cost(y);
                for (int j = 0; j < n_ + m_; ++j)
                    d[j] = stat_[j] == Basic ? 0.0 : obj_[j] - dot_col(j, y);
                if (++degen_streak > 300) return LpStatus::IterLimit;
                continue;
            }

            const int lj = basic_[r];
            const double target = below ? lb_[lj] : ub_[lj];
            const double move = (x_[lj] - target) / w[r];
            x_[q] += move;
            for (int i = 0; i < m_; ++i)
                if (i != r) x_[basic_[i]] -= move * w[i];
            x_[lj] = target;
            stat_[lj] = below ? AtLower : AtUpper;
            stat_[q] = Basic;
            if (!update_basis(r, q, w)) return LpStatus::Singular;

            if (updates_since_refactor_ == 0) {
                compute_basics();
                btran_cost(y);
                for (int j = 0; j < n_ + m_; ++j)
                    d[j] = stat_[j] == Basic ? 0.0 : obj_[j] - dot_col(j, y);
            } else if ((local_iters & 63) == 0) {
                // periodic exact re-pricing against drift
                btran_cost(y);
                for (int j = 0; j < n_ + m_; ++j)
                    d[j] = stat_[j] == Basic ? 0.0 : obj_[j] - dot_col(j, y);
            } else {
                const double theta = d[q] / alpha[q];
                if (theta != 0.0)
                    for (int j = 0; j < n_ + m_; ++j) {
                        if (stat_[j] == Basic || alpha[j] == 0.0) continue;
                        d[j] -= theta * alpha[j];
                    }
                d[lj] = -theta;
                d[q] = 0.0;
                if (std::abs(theta) <= 1e-11) { if (++degen_streak > 150) bland = true; }
                else { degen_streak = 0; bland = false; }
            }
        }
    }
};

} // namespace rvpp
