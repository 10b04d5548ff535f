#include "qpar/lp.hpp"

#include <stdexcept>

#include "qpar/errors.hpp"

namespace qpar {

namespace {

struct Tableau {
    int rows = 0, cols = 0;           // cols excludes the rhs cell
    std::vector<std::vector<Rat>> a;  // rows x (cols+1), last cell = rhs
    std::vector<Rat> cost;            // reduced costs, size cols
    Rat cost_rhs;                     // objective = -cost_rhs under the update rule
    std::vector<int> basis;           // size rows
    long pivots = 0;

    void pivot(int r, int jc) {
        Rat p = a[r][jc];
        if (p != 1)
            for (auto& v : a[r])
                if (v != 0) v /= p;
        for (int i = 0; i < rows; ++i) {
            if (i == r) continue;
            Rat f = a[i][jc];
            if (f == 0) continue;
            for (int j = 0; j <= cols; ++j)
                if (a[r][j] != 0) a[i][j] -= f * a[r][j];
        }
        Rat f = cost[jc];
        if (f != 0) {
            for (int j = 0; j < cols; ++j)
                if (a[r][j] != 0) cost[j] -= f * a[r][j];
            cost_rhs -= f * a[r][cols];
        }
        basis[r] = jc;
        ++pivots;
    }

    // minimize with Bland's rule; 'enterable' masks columns allowed to enter.
    // returns false when unbounded
    bool run(const std::vector<bool>& enterable) {
        for (;;) {
            int jc = -1;
            for (int j = 0; j < cols; ++j)
                if (enterable[j] && cost[j] < 0) {
                    jc = j;
                    break;
                }
            if (jc < 0) return true;
            int r = -1;
            for (int i = 0; i < rows; ++i) {
                if (a[i][jc] <= 0) continue;
                if (r < 0) {
                    r = i;
                    continue;
                }
                Rat lhs = a[i][cols] * a[r][jc];
                Rat rhs = a[r][cols] * a[i][jc];
                if (lhs < rhs || (lhs == rhs && basis[i] < basis[r])) r = i;
            }
            if (r < 0) return false;
            pivot(r, jc);
        }
    }
};

}  // namespace

LpResult solve_lp(const LpInstance& lp, std::size_t max_nonzeros) {
    check_guard("lp.nonzeros", static_cast<long long>(max_nonzeros),
                static_cast<long long>(lp.nonzeros()));
    if (static_cast<int>(lp.objective.size()) != lp.num_vars ||
        static_cast<int>(lp.nonneg.size()) != lp.num_vars)
        throw ValidationError("lp: field lengths do not match num_vars");

    const int m = static_cast<int>(lp.rows.size());

    // column layout: one column per nonnegative variable, two (x+, x-) per
    // free variable, then slack/surplus columns, then artificials
    std::vector<int> col_pos(lp.num_vars), col_neg(lp.num_vars, -1);
    int ncols = 0;
    for (int v = 0; v < lp.num_vars; ++v) {
        col_pos[v] = ncols++;
        if (!lp.nonneg[v]) col_neg[v] = ncols++;
    }
    const int slack_base = ncols;
    for (const auto& r : lp.rows)
        if (r.rel != Rel::eq) ++ncols;
    const int art_base = ncols;

    Tableau t;
    t.rows = m;
    t.a.assign(m, {});
    t.basis.assign(m, -1);

    std::vector<std::vector<Rat>> dense(m, std::vector<Rat>(static_cast<std::size_t>(art_base) + 1));
    {
        int slack = slack_base;
        for (int i = 0; i < m; ++i) {
            const auto& row = lp.rows[i];
            auto& d = dense[i];
            for (const auto& [v, c] : row.coef) {
                if (v < 0 || v >= lp.num_vars) throw ValidationError("lp: variable out of range");
                d[col_pos[v]] += c;
                if (col_neg[v] >= 0) d[col_neg[v]] -= c;
            }
            d[art_base] = row.rhs;
            if (row.rel == Rel::le) d[slack++] = 1;
            else if (row.rel == Rel::ge) d[slack++] = -1;
            if (d[art_base] < 0)
                for (auto& x : d) x = -x;
        }
    }

    // rows whose slack has coefficient +1 start basic on the slack; the rest
    // get an artificial variable
    int n_art = 0;
    std::vector<int> art_col(m, -1);
    {
        int slack = slack_base;
        for (int i = 0; i < m; ++i) {
            int s = (lp.rows[i].rel != Rel::eq) ? slack++ : -1;
            if (s >= 0 && dense[i][s] == 1) t.basis[i] = s;
            else art_col[i] = art_base + n_art++;
        }
    }
    t.cols = art_base + n_art;
    for (int i = 0; i < m; ++i) {
        t.a[i].assign(static_cast<std::size_t>(t.cols) + 1, Rat(0));
        for (int j = 0; j < art_base; ++j) t.a[i][j] = dense[i][j];
        t.a[i][t.cols] = dense[i][art_base];
        if (art_col[i] >= 0) {
            t.a[i][art_col[i]] = 1;
            t.basis[i] = art_col[i];
        }
    }

    std::vector<bool> enterable(static_cast<std::size_t>(t.cols), true);

    // phase 1: minimize the sum of artificials
    if (n_art > 0) {
        t.cost.assign(static_cast<std::size_t>(t.cols), Rat(0));
        t.cost_rhs = 0;
        for (int i = 0; i < m; ++i) {
            if (art_col[i] < 0) continue;
            for (int j = 0; j < t.cols; ++j) t.cost[j] -= t.a[i][j];
            t.cost_rhs -= t.a[i][t.cols];
        }
        for (int i = 0; i < m; ++i)
            if (art_col[i] >= 0) t.cost[art_col[i]] = 0;
        if (!t.run(enterable)) throw std::logic_error("lp: phase 1 unbounded");
        Rat art_sum = -t.cost_rhs;
        if (art_sum != 0) return {LpStatus::infeasible, Rat(0), {}, t.pivots};
        // pivot residual artificials out where possible; all-zero rows are
        // redundant and stay (their artificial never leaves zero)
        for (int i = 0; i < m; ++i) {
            if (t.basis[i] < art_base) continue;
            for (int j = 0; j < art_base; ++j)
                if (t.a[i][j] != 0) {
                    t.pivot(i, j);
                    break;
                }
        }
        for (int j = art_base; j < t.cols; ++j) enterable[j] = false;
    }

    // phase 2: minimize -objective
    t.cost.assign(static_cast<std::size_t>(t.cols), Rat(0));
    t.cost_rhs = 0;
    for (int v = 0; v < lp.num_vars; ++v) {
        t.cost[col_pos[v]] = -lp.objective[v];
        if (col_neg[v] >= 0) t.cost[col_neg[v]] = lp.objective[v];
    }
    for (int i = 0; i < m; ++i) {
        if (t.basis[i] >= art_base) continue;  // artificial basic at zero
        Rat cb = t.cost[t.basis[i]];
        if (cb == 0) continue;
        for (int j = 0; j < t.cols; ++j) t.cost[j] -= cb * t.a[i][j];
        t.cost_rhs -= cb * t.a[i][t.cols];
    }
    // note: after the elimination above, basic columns have zero reduced cost
    if (!t.run(enterable)) return {LpStatus::unbounded, Rat(0), {}, t.pivots};

    LpResult res;
    res.status = LpStatus::optimal;
    res.pivots = t.pivots;
    std::vector<Rat> colval(static_cast<std::size_t>(t.cols), Rat(0));
    for (int i = 0; i < m; ++i) colval[t.basis[i]] = t.a[i][t.cols];
    res.point.resize(lp.num_vars);
    for (int v = 0; v < lp.num_vars; ++v) {
        res.point[v] = colval[col_pos[v]];
        if (col_neg[v] >= 0) res.point[v] -= colval[col_neg[v]];
    }
    res.value = 0;
    for (int v = 0; v < lp.num_vars; ++v) res.value += lp.objective[v] * res.point[v];

    // exact feasibility re-check of the returned point
    for (const auto& row : lp.rows) {
        Rat lhs(0);
        for (const auto& [v, c] : row.coef) lhs += c * res.point[v];
        bool ok = row.rel == Rel::le ? lhs <= row.rhs
                : row.rel == Rel::ge ? lhs >= row.rhs
                                     : lhs == row.rhs;
        if (!ok) throw std::logic_error("lp: solver returned an infeasible point");
    }
    for (int v = 0; v < lp.num_vars; ++v)
        if (lp.nonneg[v] && res.point[v] < 0)
            throw std::logic_error("lp: negative value for nonnegative variable");
    return res;
}

}  // namespace qpar
