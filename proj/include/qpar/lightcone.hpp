#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qpar/boolfn.hpp"
#include "qpar/nsc.hpp"
#include "qpar/qsim.hpp"

namespace qpar {

// conflict graph over input qubits: edge (j,k) iff forward lightcones intersect
struct ConflictGraph {
    int n = 0;
    std::vector<std::vector<bool>> adj;

    int degree(int v) const {
        int d = 0;
        for (bool e : adj[v]) d += e;
        return d;
    }
    int max_degree() const {
        int m = 0;
        for (int v = 0; v < n; ++v) m = std::max(m, degree(v));
        return m;
    }
};

ConflictGraph conflict_graph(const Circuit& c);

// ascending-order greedy; always at least n/(max_degree+1) vertices
std::vector<int> greedy_independent_set(const ConflictGraph& g);

// Simulates the circuit with the inputs outside s hard-coded to `fixing`
// (bit i of fixing is the value of the i-th element of s^c, bit 1 = -1) and
// packages the conditional output table as a channel. Player i owns the
// outputs in the forward lightcone of s[i]; everything else is referee.
template <class T>
NsChannel<T> extract_channel(const Circuit& c, const std::vector<int>& s, uint32_t fixing);

template <class T>
struct ReductionResult {
    std::vector<int> s;       // independent set of input qubits (0-based)
    int input_n = 0;          // circuit input count; fixing width is input_n - |s|
    uint32_t fixing = 0;      // over s^c, ascending
    int sign = 1;             // +1 keeps f, -1 negates it
    T best_correlation{};     // signed correlation of (sign * f) composed with the restriction
    T advantage{};            // |best_correlation| / 2
    T full_correlation{};     // correlation of f with parity over all inputs
    bool exhaustive = false;
    NsChannel<T> channel;
    std::vector<std::vector<int>> player_outputs;
    std::vector<int> referee_outputs;
};

// Scans fixings of s^c (exhaustively when 2^|s^c| <= budget, else `budget`
// seeded samples) and keeps the fixing maximizing |correlation with parity on
// the free inputs|; ties break toward the lexicographically smallest fixing.
template <class T>
ReductionResult<T> best_restriction_search(const Circuit& c, const BoolFn<T>& f,
                                           const std::vector<int>& s, uint64_t budget,
                                           uint64_t seed);

template <class T>
void write_reduction(std::ostream& out, const ReductionResult<T>& r);

}  // namespace qpar
