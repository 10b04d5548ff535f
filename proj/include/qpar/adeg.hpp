#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qpar/boolfn.hpp"
#include "qpar/lp.hpp"
#include "qpar/nsc.hpp"

namespace qpar {

// polynomial over +-1 inputs given by character monomials and coefficients
struct Approximant {
    std::vector<uint32_t> monomials;  // subset masks
    std::vector<Rat> coef;
    Rat sup_error;  // max_x |f(x) - g(x)|, recomputed independently of the LP

    Rat evaluate(uint32_t x) const {
        Rat acc(0);
        for (std::size_t i = 0; i < monomials.size(); ++i)
            acc += coef[i] * Rat(chi_sign(monomials[i], x));
        return acc;
    }
};

struct DegreeResult {
    int degree = 0;
    Approximant witness;
};

// least k admitting a degree-<=k polynomial with ||f - g||_inf <= eps on the
// +-1 truth table; upward scan, feasibility is monotone in k
DegreeResult approx_degree(const BoolFnQ& f, const Rat& eps);

// same with monomials restricted by the number of partition blocks they touch;
// the default partition is consecutive blocks of size k
DegreeResult block_approx_degree(const BoolFnQ& f, int k, const Rat& eps,
                                 const std::vector<std::vector<int>>* partition = nullptr);

struct AdvantageResult {
    Rat advantage;
    OutputDistribution<Rat> mu, nu;
};

// maximum of Pr[f(mu)=1] - Pr[f(nu)=1] over k-wise indistinguishable pairs,
// where f=1 means the 0/1 value of the pm1 function (+1 -> 0, -1 -> 1)
AdvantageResult max_advantage_kwise(const BoolFnQ& f, int k);

struct DualityReport {
    Rat advantage;
    int degree = 0;   // eps/2-approximate degree in the 0/1 normalization
    bool fooled = false;
    bool low_degree = false;
    bool holds = false;
};

// checks [max advantage at level k <= eps] <=> [deg~_{eps/2}(f) <= k] where
// the degree is measured in the 0/1 normalization of the theorem; under the
// affine map between ranges that equals the pm1-metric LP at eps
DualityReport duality_check(const BoolFnQ& f, int k, const Rat& eps);

struct BlockRelReport {
    int adeg = 0;
    int bdeg = 0;
    bool impl_left = false;   // adeg < n/k  =>  bdeg < n/k
    bool impl_right = false;  // bdeg < n/k  =>  adeg < n - k
    bool sandwich = false;    // bdeg <= adeg <= k * bdeg
    bool holds = false;
};

BlockRelReport blockdeg_relations_check(const BoolFnQ& f, int k);

// block degree of a single monomial against a partition
int block_degree_of(uint32_t s, const std::vector<std::vector<int>>& partition);

std::vector<std::vector<int>> consecutive_partition(int n, int k);

}  // namespace qpar
