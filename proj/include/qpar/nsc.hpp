#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "qpar/boolfn.hpp"
#include "qpar/errors.hpp"
#include "qpar/lp.hpp"
#include "qpar/rational.hpp"
#include "qpar/rng.hpp"

namespace qpar {

// No-signaling channel as an explicit conditional probability table together
// with a backwards-lightcone map b: output -> input or -1 for the referee
// outputs. Entries are exact rationals on the rat path, doubles otherwise.
template <class T>
struct NsChannel {
    int n = 0;  // input arity
    int N = 0;  // output arity
    std::vector<int> b;                  // size N, -1 encodes bottom
    std::vector<std::vector<T>> table;   // [2^n][2^N]
    std::vector<bool> flagged;           // rows given the uniform fallback by condition()
    bool ns_checked = false;             // set after passing is_no_signaling

    std::size_t rows() const { return std::size_t(1) << n; }
    std::size_t cols() const { return std::size_t(1) << N; }
    static Arith arith() { return arith_of<T>(); }

    void validate(double structural_tol = 1e-12) const;
};

using NsChannelQ = NsChannel<Rat>;
using NsChannelD = NsChannel<double>;

template <class T>
struct OutputDistribution {
    int arity = 0;
    std::vector<T> p;
    void validate(double structural_tol = 1e-12) const;
};

// witness of a no-signaling violation: inputs x, x2 agree on s_mask but the
// reduced channels on t (= outputs backed by s_mask or the referee) differ
struct NsViolation {
    uint32_t s_mask = 0;
    uint32_t x = 0, x2 = 0;
    std::vector<int> t;
};

// checks the definition over every S subseteq [n]; exact on the rat path
template <class T>
std::optional<NsViolation> no_signaling_violation(const NsChannel<T>& ch, double tol = 0.0);

template <class T>
bool is_no_signaling(NsChannel<T>& ch, double tol = 0.0) {
    bool ok = !no_signaling_violation(ch, tol).has_value();
    ch.ns_checked = ok;
    return ok;
}

// marginalizes onto the output subset t (ascending 0-based indices)
template <class T>
NsChannel<T> reduce(const NsChannel<T>& ch, const std::vector<int>& t);

// conditions on y_J = y (bit i of y is the outcome of j_idx[i]; bit 1 = -1),
// dropping J from the outputs. x_fix additionally fixes one input coordinate
// and removes it; outputs previously mapped to it become referee outputs.
// Rows where the conditioning event has probability zero are set uniform and
// flagged; if that happens for every row the conditional is empty and throws.
template <class T>
NsChannel<T> condition(const NsChannel<T>& ch, const std::vector<int>& j_idx, uint32_t y,
                       std::optional<std::pair<int, int>> x_fix = std::nullopt);

template <class T>
OutputDistribution<T> pushforward(const NsChannel<T>& ch, const std::vector<T>& input_dist);

// input distributions over 2^n masks
template <class T>
std::vector<T> uniform_input(int n);
template <class T>
std::vector<T> uniform_even_input(int n);
template <class T>
std::vector<T> uniform_odd_input(int n);
template <class T>
std::vector<T> point_input(int n, uint32_t x);

// largest k such that all marginals on <= k coordinates coincide; N when equal
template <class T>
int kwise_level(const OutputDistribution<T>& mu, const OutputDistribution<T>& nu,
                double tol = 0.0);
// largest count of size-k blocks whose unions have identical marginals
template <class T>
int blockwise_level(const OutputDistribution<T>& mu, const OutputDistribution<T>& nu, int k,
                    double tol = 0.0);

// ---- parity games ------------------------------------------------------

struct ParityGame {
    int players = 0;
    int width_k = 1;
    int referee_m = 0;
    BoolFnQ predicate;  // pm1 on players*width_k + referee_m bits

    int outputs() const { return players * width_k + referee_m; }
    void validate() const;
};

struct GameValue {
    Rat value;            // max winning probability over the no-signaling polytope
    NsChannelQ witness;   // optimal vertex
};

GameValue game_value_nosignaling(const ParityGame& g);

// maximizes a linear objective over the (n,k,m) no-signaling polytope with
// the block lightcone map; objective is indexed by x*2^N + y. Returns the
// optimal vertex; the optimum value lands in *value when given.
NsChannelQ ns_polytope_argmax(int n, int k, int m, const std::vector<Rat>& objective,
                              Rat* value = nullptr);

// value of the best of `count` seeded deterministic/shared-randomness
// classical strategies, for LP-dominance checks
Rat best_classical_value(const ParityGame& g, int count, uint64_t seed);

// ---- quantum channels --------------------------------------------------

template <class C>
struct Mat {
    int d = 0;
    std::vector<C> e;  // row-major d x d
    static Mat identity(int d);
};

using MatQ = Mat<CplxQ>;
using MatD = Mat<cd>;

// channel induced by measuring a shared state: party i applies the POVM
// selected by input bit x_i, the referee's POVM is input-independent.
// povms[i][bit] lists 2^k elements; referee lists 2^m elements (m = 0 and an
// empty list is allowed). The exact path accepts an unnormalized state.
template <class C>
NsChannel<typename RealOf<C>::type> quantum_channel(
    const std::vector<C>& state, const std::vector<int>& party_dims,
    const std::vector<std::array<std::vector<Mat<C>>, 2>>& povms,
    const std::vector<Mat<C>>& referee_povm, int ref_dim, int width_k, int referee_m,
    double tol = 1e-10);

// ---- generators --------------------------------------------------------

// deterministic copy channel, b = identity
NsChannelQ identity_channel(int n);
// uniform over even strings for even inputs, odd strings for odd inputs
NsChannelQ parity_channel(int n);
// y1 xor y2 = x1 and x2 with uniform marginals
NsChannelQ pr_box_channel();
// seeded mixture of deterministic local strategies (always no-signaling)
NsChannelQ random_local_mixture(int n, int k, uint64_t seed);
// optimal vertex of the no-signaling polytope for a seeded random objective
NsChannelQ random_polytope_vertex(int n, int k, uint64_t seed);
// GHZ state measured in X (input 0) or Y (input 1); exact probabilities
NsChannelQ ghz_channel(int parties);
// singlet measured in X (input 0) or Z (input 1); exact probabilities
NsChannelQ singlet_xz_channel();
// singlet with the CHSH-optimal bases; double path, violates CHSH
NsChannelD chsh_singlet_channel();

// ---- text format -------------------------------------------------------

NsChannelQ parse_channel(std::istream& in);
template <class T>
void write_channel(std::ostream& out, const NsChannel<T>& ch);

NsChannelD channel_to_f64(const NsChannelQ& ch);

}  // namespace qpar
