#include "qpar/adeg.hpp"

#include <algorithm>

namespace qpar {

std::vector<std::vector<int>> consecutive_partition(int n, int k) {
    if (k < 1 || n % k != 0) throw ValidationError("partition: k must divide n");
    std::vector<std::vector<int>> p;
    for (int b = 0; b < n / k; ++b) {
        std::vector<int> block;
        for (int i = 0; i < k; ++i) block.push_back(b * k + i);
        p.push_back(std::move(block));
    }
    return p;
}

int block_degree_of(uint32_t s, const std::vector<std::vector<int>>& partition) {
    int touched = 0;
    for (const auto& block : partition) {
        for (int i : block)
            if ((s >> i) & 1) {
                ++touched;
                break;
            }
    }
    return touched;
}

namespace {

void validate_partition(const std::vector<std::vector<int>>& partition, int n) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (const auto& block : partition) {
        if (block.empty()) throw ValidationError("partition: empty block");
        for (int i : block) {
            if (i < 0 || i >= n || seen[i]) throw ValidationError("partition: not a partition of [n]");
            seen[i] = true;
        }
    }
    for (bool s : seen)
        if (!s) throw ValidationError("partition: does not cover [n]");
}

// minimal sup error over the span of the given monomials, plus coefficients
std::pair<Rat, std::vector<Rat>> best_sup_error(const BoolFnQ& f,
                                                const std::vector<uint32_t>& monomials) {
    LpInstance lp;
    int t = lp.add_var(Rat(-1), true);  // maximize -t
    std::vector<int> cvar(monomials.size());
    for (std::size_t i = 0; i < monomials.size(); ++i) cvar[i] = lp.add_var(Rat(0), false);
    for (uint32_t x = 0; x < f.size(); ++x) {
        std::vector<std::pair<int, Rat>> row1, row2;
        row1.reserve(monomials.size() + 1);
        row2.reserve(monomials.size() + 1);
        for (std::size_t i = 0; i < monomials.size(); ++i) {
            Rat sign(chi_sign(monomials[i], x));
            row1.push_back({cvar[i], sign});
            row2.push_back({cvar[i], -sign});
        }
        row1.push_back({t, Rat(-1)});
        row2.push_back({t, Rat(-1)});
        lp.add_row(std::move(row1), Rel::le, f.values[x]);
        lp.add_row(std::move(row2), Rel::le, -f.values[x]);
    }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal)
        throw ValidationError("degree LP did not reach an optimum");
    std::vector<Rat> coef(monomials.size());
    for (std::size_t i = 0; i < monomials.size(); ++i) coef[i] = res.point[cvar[i]];
    return {res.point[t], std::move(coef)};
}

DegreeResult scan_degree(const BoolFnQ& f, const Rat& eps,
                         const std::function<int(uint32_t)>& level_of, int max_level) {
    if (f.range != Range::pm_one) throw ValidationError("approx degree: f must be pm1-valued");
    if (eps < 0) throw ValidationError("approx degree: eps must be nonnegative");
    check_guard("adeg.arity", 12, f.n);
    // bucket monomials by level so the scan extends the set incrementally
    std::vector<std::vector<uint32_t>> by_level(static_cast<std::size_t>(max_level) + 1);
    for (uint32_t s = 0; s < f.size(); ++s) {
        int lvl = level_of(s);
        if (lvl <= max_level) by_level[lvl].push_back(s);
    }
    std::vector<uint32_t> monomials;
    for (int k = 0; k <= max_level; ++k) {
        for (uint32_t s : by_level[k]) monomials.push_back(s);
        auto [err, coef] = best_sup_error(f, monomials);
        if (err <= eps) {
            Approximant w;
            w.monomials = monomials;
            w.coef = std::move(coef);
            w.sup_error = 0;
            for (uint32_t x = 0; x < f.size(); ++x) {
                Rat d = rat_abs(f.values[x] - w.evaluate(x));
                if (d > w.sup_error) w.sup_error = d;
            }
            if (w.sup_error > eps)
                throw ValidationError("degree witness failed the independent sup-error check");
            return {k, std::move(w)};
        }
    }
    throw ValidationError("degree scan exhausted all levels");  // unreachable: full span is exact
}

}  // namespace

DegreeResult approx_degree(const BoolFnQ& f, const Rat& eps) {
    return scan_degree(f, eps, [](uint32_t s) { return std::popcount(s); }, f.n);
}

DegreeResult block_approx_degree(const BoolFnQ& f, int k, const Rat& eps,
                                 const std::vector<std::vector<int>>* partition) {
    std::vector<std::vector<int>> part;
    if (partition) {
        part = *partition;
        validate_partition(part, f.n);
    } else {
        part = consecutive_partition(f.n, k);
    }
    int blocks = static_cast<int>(part.size());
    return scan_degree(f, eps, [&part](uint32_t s) { return block_degree_of(s, part); }, blocks);
}

AdvantageResult max_advantage_kwise(const BoolFnQ& f, int k) {
    if (f.range != Range::pm_one) throw ValidationError("max_advantage: f must be pm1-valued");
    check_guard("adeg.advantage_arity", 8, f.n);
    if (k < 0) throw ValidationError("max_advantage: k must be nonnegative");
    k = std::min(k, f.n);  // levels beyond N pin the distributions equal anyway
    const uint32_t Y = 1u << f.n;
    LpInstance lp;
    // mu occupies [0, Y), nu occupies [Y, 2Y); f(y) = -1 is the 0/1 value 1
    for (uint32_t y = 0; y < Y; ++y) lp.add_var(f.values[y] == Rat(-1) ? Rat(1) : Rat(0), true);
    for (uint32_t y = 0; y < Y; ++y) lp.add_var(f.values[y] == Rat(-1) ? Rat(-1) : Rat(0), true);
    {
        std::vector<std::pair<int, Rat>> row;
        for (uint32_t y = 0; y < Y; ++y) row.push_back({static_cast<int>(y), Rat(1)});
        lp.add_row(std::move(row), Rel::eq, Rat(1));
    }
    {
        std::vector<std::pair<int, Rat>> row;
        for (uint32_t y = 0; y < Y; ++y) row.push_back({static_cast<int>(Y + y), Rat(1)});
        lp.add_row(std::move(row), Rel::eq, Rat(1));
    }
    // equal marginals on every set of size <= k, as character equalities
    for (uint32_t t = 1; t < Y; ++t) {
        if (std::popcount(t) > k) continue;
        std::vector<std::pair<int, Rat>> row;
        for (uint32_t y = 0; y < Y; ++y) {
            Rat sign(chi_sign(t, y));
            row.push_back({static_cast<int>(y), sign});
            row.push_back({static_cast<int>(Y + y), -sign});
        }
        lp.add_row(std::move(row), Rel::eq, Rat(0));
    }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) throw ValidationError("advantage LP did not solve");
    AdvantageResult out;
    out.advantage = res.value;
    out.mu.arity = f.n;
    out.nu.arity = f.n;
    out.mu.p.assign(res.point.begin(), res.point.begin() + Y);
    out.nu.p.assign(res.point.begin() + Y, res.point.end());
    out.mu.validate();
    out.nu.validate();
    if (kwise_level(out.mu, out.nu) < k)
        throw ValidationError("advantage witness is not k-wise indistinguishable");
    return out;
}

DualityReport duality_check(const BoolFnQ& f, int k, const Rat& eps) {
    check_guard("adeg.duality_arity", 6, f.n);
    DualityReport rep;
    rep.advantage = max_advantage_kwise(f, k).advantage;
    // the 0/1-range degree at eps/2 equals the pm1-range degree at eps
    rep.degree = approx_degree(f, eps).degree;
    rep.fooled = rep.advantage <= eps;
    rep.low_degree = rep.degree <= k;
    rep.holds = rep.fooled == rep.low_degree;
    return rep;
}

BlockRelReport blockdeg_relations_check(const BoolFnQ& f, int k) {
    Rat third(1, 3);
    BlockRelReport rep;
    rep.adeg = approx_degree(f, third).degree;
    rep.bdeg = block_approx_degree(f, k, third).degree;
    const int n = f.n;
    bool adeg_small = Rat(rep.adeg) * k < n;  // adeg < n/k
    bool bdeg_small = Rat(rep.bdeg) * k < n;
    rep.impl_left = !adeg_small || bdeg_small;
    rep.impl_right = !bdeg_small || (rep.adeg < n - k);
    rep.sandwich = rep.bdeg <= rep.adeg && rep.adeg <= k * rep.bdeg;
    rep.holds = rep.impl_left && rep.impl_right && rep.sandwich;
    return rep;
}

}  // namespace qpar
