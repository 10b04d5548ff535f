#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qpar/errors.hpp"
#include "qpar/kernels.hpp"
#include "qpar/rational.hpp"
#include "qpar/rng.hpp"

namespace qpar {

// Mask convention used across the whole project: variable i lives in bit i-1,
// bit value 0 encodes x_i = +1 and bit value 1 encodes x_i = -1. Subset masks
// use the same bit order.

inline int chi_sign(uint32_t subset, uint32_t x) {
    return (std::popcount(subset & x) & 1) ? -1 : 1;
}

enum class Range { pm_one, real };
enum class Arith { rat, f64 };

template <class T>
constexpr Arith arith_of() {
    return std::is_same_v<T, Rat> ? Arith::rat : Arith::f64;
}
inline const char* arith_name(Arith a) { return a == Arith::rat ? "rat" : "f64"; }

// dense truth table of a real-valued function on the n-cube
template <class T>
struct BoolFn {
    int n = 0;
    Range range = Range::real;
    std::vector<T> values;  // size 2^n, indexed by input mask

    BoolFn() = default;
    BoolFn(int n_, Range r, std::vector<T> vals) : n(n_), range(r), values(std::move(vals)) {
        validate();
    }

    std::size_t size() const { return std::size_t(1) << n; }
    const T& operator()(uint32_t mask) const { return values[mask]; }
    static Arith arith() { return arith_of<T>(); }

    void validate() const {
        if (n < 0) throw ValidationError("boolfn: negative arity");
        check_guard("boolfn.arity", 20, n);
        if (values.size() != (std::size_t(1) << n))
            throw ValidationError("boolfn: values length != 2^n");
        if (range == Range::pm_one) {
            for (const T& v : values)
                if (!(v == T(1) || v == T(-1)))
                    throw ValidationError("boolfn: pm1 range requires every value in {+1,-1}");
        }
    }
};

using BoolFnQ = BoolFn<Rat>;
using BoolFnD = BoolFn<double>;

template <class T>
struct FourierSpectrum {
    int n = 0;
    std::vector<T> coef;  // size 2^n, indexed by subset mask
    Arith path = arith_of<T>();

    std::size_t size() const { return std::size_t(1) << n; }
    const T& operator()(uint32_t subset) const { return coef[subset]; }

    // largest |S| with nonzero coefficient; -1 for the zero function
    int degree() const {
        int d = -1;
        for (uint32_t s = 0; s < size(); ++s)
            if (!(coef[s] == T(0))) d = std::max(d, std::popcount(s));
        return d;
    }
};

// ---- constructors ------------------------------------------------------

template <class T>
BoolFn<T> constant_fn(int n, int value) {
    return BoolFn<T>(n, Range::pm_one, std::vector<T>(std::size_t(1) << n, T(value)));
}

template <class T>
BoolFn<T> chi_fn(int n, uint32_t subset) {
    std::vector<T> v(std::size_t(1) << n);
    for (uint32_t x = 0; x < v.size(); ++x) v[x] = T(chi_sign(subset, x));
    return BoolFn<T>(n, Range::pm_one, std::move(v));
}

template <class T>
BoolFn<T> parity_fn(int n) {
    return chi_fn<T>(n, (n == 32 ? ~0u : (1u << n) - 1));
}

// Trojan-horse function on 2m variables: equals the parity of the first m
// variables when the trailing m variables are the all-ones bitstring (bit
// value 1, i.e. x = -1 under the encoding), and +1 otherwise.
template <class T>
BoolFn<T> trojan_horse_fn(int m) {
    int n = 2 * m;
    uint32_t head = (1u << m) - 1;
    uint32_t tail = ((1u << m) - 1) << m;
    std::vector<T> v(std::size_t(1) << n);
    for (uint32_t x = 0; x < v.size(); ++x)
        v[x] = ((x & tail) == tail) ? T(chi_sign(head, x)) : T(1);
    return BoolFn<T>(n, Range::pm_one, std::move(v));
}

template <class T = Rat>
BoolFn<T> random_pm1_fn(int n, SplitRng& rng) {
    std::vector<T> v(std::size_t(1) << n);
    for (auto& x : v) x = T(rng.pm1());
    return BoolFn<T>(n, Range::pm_one, std::move(v));
}

// ---- Fourier analysis --------------------------------------------------

// in-place butterfly; generic scalar version used by the rat path
template <class T>
void wht_butterfly_generic(std::vector<T>& v) {
    const std::size_t len = v.size();
    for (std::size_t h = 1; h < len; h <<= 1)
        for (std::size_t i0 = 0; i0 < len; i0 += 2 * h)
            for (std::size_t j = i0; j < i0 + h; ++j) {
                T a = v[j];
                T b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
}

template <class T>
FourierSpectrum<T> wht(const BoolFn<T>& f) {
    FourierSpectrum<T> spec;
    spec.n = f.n;
    spec.coef = f.values;
    if constexpr (std::is_same_v<T, double>) {
        kern::wht_butterfly(spec.coef.data(), f.n);
        kern::scale(spec.coef.data(), spec.coef.size(), std::ldexp(1.0, -f.n));
    } else {
        wht_butterfly_generic(spec.coef);
        Rat norm = rat_pow2(-f.n);
        for (auto& c : spec.coef) c *= norm;
    }
    return spec;
}

template <class T>
BoolFn<T> inverse_wht(const FourierSpectrum<T>& spec, Range range = Range::real) {
    std::vector<T> v = spec.coef;
    if constexpr (std::is_same_v<T, double>) {
        kern::wht_butterfly(v.data(), spec.n);
    } else {
        wht_butterfly_generic(v);
    }
    return BoolFn<T>(spec.n, range, std::move(v));
}

template <class T>
T fourier_tail(const FourierSpectrum<T>& spec, int k) {
    if (k < 0 || k > spec.n + 1) throw ValidationError("fourier_tail: k out of range [0, n+1]");
    T acc(0);
    for (uint32_t s = 0; s < spec.size(); ++s)
        if (std::popcount(s) >= k) acc += spec.coef[s] * spec.coef[s];
    return acc;
}

template <class T>
T correlation(const BoolFn<T>& f, const BoolFn<T>& g) {
    if (f.n != g.n) throw ValidationError("correlation: arity mismatch");
    T acc(0);
    for (uint32_t x = 0; x < f.size(); ++x) acc += f.values[x] * g.values[x];
    if constexpr (std::is_same_v<T, double>) return acc * std::ldexp(1.0, -f.n);
    else return acc * rat_pow2(-f.n);
}

// ---- restrictions ------------------------------------------------------

// fixed assignment with stars; symbols are +1, -1 and 0 for a star
struct Restriction {
    int n = 0;
    std::vector<int8_t> assign;  // size n

    int star_count() const {
        return static_cast<int>(std::count(assign.begin(), assign.end(), int8_t(0)));
    }
    void validate() const {
        if (static_cast<int>(assign.size()) != n)
            throw ValidationError("restriction: assignment length != n");
        for (int8_t a : assign)
            if (a != 0 && a != 1 && a != -1)
                throw ValidationError("restriction: symbols must be +1, -1 or star");
    }
};

// fills the stars of rho with z (mask over the starred coordinates in
// ascending coordinate order) and returns the full input mask
inline uint32_t fill_restriction(const Restriction& rho, uint32_t z) {
    uint32_t x = 0;
    int zi = 0;
    for (int i = 0; i < rho.n; ++i) {
        if (rho.assign[i] == 0) {
            if ((z >> zi) & 1) x |= 1u << i;
            ++zi;
        } else if (rho.assign[i] == -1) {
            x |= 1u << i;
        }
    }
    return x;
}

template <class T>
BoolFn<T> restrict_fn(const BoolFn<T>& f, const Restriction& rho) {
    if (rho.n != f.n) throw ValidationError("restrict: arity mismatch");
    rho.validate();
    int stars = rho.star_count();
    std::vector<T> v(std::size_t(1) << stars);
    for (uint32_t z = 0; z < v.size(); ++z) v[z] = f.values[fill_restriction(rho, z)];
    return BoolFn<T>(stars, f.range, std::move(v));
}

// each coordinate is a star with probability delta, else +-1 uniformly
Restriction sample_restriction(int n, const Rat& delta, uint64_t seed);

// ---- permutations ------------------------------------------------------

// pi is 0-based: result(x) = f(y) with y_i = x_{pi[i]}
template <class T>
BoolFn<T> permute_inputs(const BoolFn<T>& f, const std::vector<int>& pi) {
    if (static_cast<int>(pi.size()) != f.n) throw ValidationError("permute: length != n");
    std::vector<bool> seen(f.n, false);
    for (int p : pi) {
        if (p < 0 || p >= f.n || seen[p]) throw ValidationError("permute: not a permutation");
        seen[p] = true;
    }
    std::vector<T> v(f.size());
    for (uint32_t x = 0; x < f.size(); ++x) {
        uint32_t y = 0;
        for (int i = 0; i < f.n; ++i)
            if ((x >> pi[i]) & 1) y |= 1u << i;
        v[x] = f.values[y];
    }
    return BoolFn<T>(f.n, f.range, std::move(v));
}

// ---- decision trees ----------------------------------------------------

struct DecisionTree {
    struct Node {
        int var = -1;  // 0-based variable index; -1 for a leaf
        int left = -1;  // +1 branch
        int right = -1;  // -1 branch
        int8_t leaf = 1;
    };
    std::vector<Node> nodes;
    int root = -1;

    bool empty() const { return root < 0; }
    int add_leaf(int8_t value) {
        nodes.push_back({-1, -1, -1, value});
        return static_cast<int>(nodes.size()) - 1;
    }
    int add_node(int var, int left, int right) {
        nodes.push_back({var, left, right, 0});
        return static_cast<int>(nodes.size()) - 1;
    }
    int max_var() const {
        int m = -1;
        for (const auto& nd : nodes)
            if (nd.var >= 0) m = std::max(m, nd.var);
        return m;
    }
};

int eval_dt(const DecisionTree& t, uint32_t x);
int dt_depth(const DecisionTree& t);

// true when no variable repeats on any root-to-leaf path
bool dt_is_canonical(const DecisionTree& t);
// removes repeated queries along paths; never increases depth
DecisionTree dt_canonicalize(const DecisionTree& t);

// full tree querying variables 0..n-1 in order with f's values at the leaves
template <class T>
DecisionTree canonical_tree(const BoolFn<T>& f) {
    DecisionTree t;
    // build recursively over prefixes of fixed variables
    auto rec = [&](auto&& self, int depth, uint32_t prefix) -> int {
        if (depth == f.n) {
            const T& v = f.values[prefix];
            return t.add_leaf(v == T(1) ? 1 : -1);
        }
        int l = self(self, depth + 1, prefix);               // x_depth = +1 (bit 0)
        int r = self(self, depth + 1, prefix | (1u << depth));  // x_depth = -1 (bit 1)
        return t.add_node(depth, l, r);
    };
    if (f.range != Range::pm_one) throw ValidationError("canonical_tree: pm1 range required");
    t.root = rec(rec, 0, 0);
    return t;
}

template <class T>
BoolFn<T> dt_to_boolfn(const DecisionTree& t, int n) {
    std::vector<T> v(std::size_t(1) << n);
    for (uint32_t x = 0; x < v.size(); ++x) v[x] = T(eval_dt(t, x));
    return BoolFn<T>(n, Range::pm_one, std::move(v));
}

// ---- text formats ------------------------------------------------------

// truth-table format: header "boolfn n=<int> range=<pm1|real>", then one line
// per mask in ascending order, the mask rendered with variable 1 leftmost
BoolFnQ parse_boolfn(std::istream& in);
void write_boolfn(std::ostream& out, const BoolFnQ& f);
void write_boolfn(std::ostream& out, const BoolFnD& f);

std::string mask_to_string(uint32_t mask, int n);
uint32_t mask_from_string(const std::string& s, int n);

// prefix form "(x<i> <left> <right>)" with leaves +1/-1; left is the +1 branch
DecisionTree parse_tree(const std::string& text);
std::string tree_to_string(const DecisionTree& t);

template <class T>
BoolFn<double> to_f64(const BoolFn<T>& f) {
    std::vector<double> v(f.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = to_double(f.values[i]);
    return BoolFn<double>(f.n, f.range, std::move(v));
}

}  // namespace qpar
