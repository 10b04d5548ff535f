#pragma once

#include <cstddef>
#include <vector>

#include "qpar/rational.hpp"

namespace qpar {

enum class Rel { le, eq, ge };

struct LpRow {
    std::vector<std::pair<int, Rat>> coef;  // (variable, coefficient), sparse
    Rel rel = Rel::le;
    Rat rhs;
};

// Exact rational linear program: maximize objective . x subject to the rows.
// Variables are nonnegative by default; clear the flag for free variables.
struct LpInstance {
    int num_vars = 0;
    std::vector<Rat> objective;
    std::vector<LpRow> rows;
    std::vector<bool> nonneg;

    int add_var(const Rat& obj_coef, bool nonnegative = true) {
        objective.push_back(obj_coef);
        nonneg.push_back(nonnegative);
        return num_vars++;
    }
    void add_row(std::vector<std::pair<int, Rat>> coef, Rel rel, Rat rhs) {
        rows.push_back({std::move(coef), rel, std::move(rhs)});
    }
    std::size_t nonzeros() const {
        std::size_t nz = 0;
        for (const auto& r : rows) nz += r.coef.size();
        return nz;
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rat value;                // objective at the optimum
    std::vector<Rat> point;   // primal point, satisfies every row exactly
    long pivots = 0;
};

// Two-phase primal simplex over exact rationals with Bland's anti-cycling
// rule. The returned point is a basic feasible solution and is re-checked
// against every constraint before returning.
LpResult solve_lp(const LpInstance& lp, std::size_t max_nonzeros = 50000);

}  // namespace qpar
