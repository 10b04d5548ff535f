#include "qpar/lightcone.hpp"

#include <algorithm>
#include <ostream>

namespace qpar {

ConflictGraph conflict_graph(const Circuit& c) {
    ConflictGraph g;
    g.n = c.n;
    g.adj.assign(static_cast<std::size_t>(c.n), std::vector<bool>(static_cast<std::size_t>(c.n), false));
    std::vector<std::vector<int>> cones(static_cast<std::size_t>(c.n));
    for (int j = 0; j < c.n; ++j) cones[j] = forward_lightcone(c, j);
    for (int j = 0; j < c.n; ++j)
        for (int k = j + 1; k < c.n; ++k) {
            bool meet = false;
            for (int q : cones[j])
                if (std::binary_search(cones[k].begin(), cones[k].end(), q)) {
                    meet = true;
                    break;
                }
            if (meet) g.adj[j][k] = g.adj[k][j] = true;
        }
    return g;
}

std::vector<int> greedy_independent_set(const ConflictGraph& g) {
    std::vector<int> s;
    std::vector<bool> blocked(static_cast<std::size_t>(g.n), false);
    for (int v = 0; v < g.n; ++v) {
        if (blocked[v]) continue;
        s.push_back(v);
        for (int u = 0; u < g.n; ++u)
            if (g.adj[v][u]) blocked[u] = true;
    }
    return s;
}

namespace {

// merges free bits z (over s, ascending) and fixed bits (over s^c, ascending)
// into a full input mask
uint32_t merge_input(int n, const std::vector<int>& s, uint32_t z, uint32_t fixing) {
    std::vector<bool> in_s(static_cast<std::size_t>(n), false);
    for (int v : s) in_s[v] = true;
    uint32_t x = 0;
    int zi = 0, fi = 0;
    for (int i = 0; i < n; ++i) {
        if (in_s[i]) {
            if ((z >> zi) & 1) x |= 1u << i;
            ++zi;
        } else {
            if ((fixing >> fi) & 1) x |= 1u << i;
            ++fi;
        }
    }
    return x;
}

void check_independent(const Circuit& c, const std::vector<int>& s) {
    ConflictGraph g = conflict_graph(c);
    for (std::size_t a = 0; a < s.size(); ++a) {
        if (s[a] < 0 || s[a] >= c.n) throw ValidationError("reduction: set member out of range");
        for (std::size_t b = a + 1; b < s.size(); ++b)
            if (g.adj[s[a]][s[b]])
                throw ValidationError("reduction: lightcones overlap, set is not independent");
    }
}

}  // namespace

template <class T>
NsChannel<T> extract_channel(const Circuit& c, const std::vector<int>& s, uint32_t fixing) {
    check_independent(c, s);
    NsChannel<T> ch;
    ch.n = static_cast<int>(s.size());
    ch.N = c.qubits();
    ch.b.assign(static_cast<std::size_t>(ch.N), -1);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (int q : forward_lightcone(c, s[i])) ch.b[q] = static_cast<int>(i);
    ch.table.resize(std::size_t(1) << ch.n);
    for (uint32_t z = 0; z < ch.rows(); ++z) {
        uint32_t x = merge_input(c.n, s, z, fixing);
        ch.table[z] = simulate<T>(c, x).p;
    }
    ch.validate();
    return ch;
}

template <class T>
ReductionResult<T> best_restriction_search(const Circuit& c, const BoolFn<T>& f,
                                           const std::vector<int>& s, uint64_t budget,
                                           uint64_t seed) {
    if (f.n != c.qubits()) throw ValidationError("restriction search: observable arity mismatch");
    check_independent(c, s);
    const int free_n = static_cast<int>(s.size());
    const int fixed_n = c.n - free_n;

    auto corr_for = [&](uint32_t fixing) {
        T acc(0);
        for (uint32_t z = 0; z < (1u << free_n); ++z) {
            T e = expectation(c, f, merge_input(c.n, s, z, fixing));
            acc += (std::popcount(z) & 1) ? T(-e) : e;
        }
        if constexpr (std::is_same_v<T, Rat>) return T(acc * rat_pow2(-free_n));
        else return T(acc * std::ldexp(1.0, -free_n));
    };

    std::vector<uint32_t> candidates;
    bool exhaustive = fixed_n < 63 && (uint64_t(1) << fixed_n) <= budget;
    if (exhaustive) {
        for (uint32_t y = 0; y < (1u << fixed_n); ++y) candidates.push_back(y);
    } else {
        SplitRng rng = SplitRng(seed).child("restriction-search");
        for (uint64_t i = 0; i < budget; ++i)
            candidates.push_back(static_cast<uint32_t>(rng.below(uint64_t(1) << fixed_n)));
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    }

    ReductionResult<T> best;
    bool have = false;
    T best_abs{};
    for (uint32_t y : candidates) {
        T corr = corr_for(y);
        T a = corr < T(0) ? T(-corr) : corr;
        if (!have || best_abs < a) {
            have = true;
            best_abs = a;
            best.fixing = y;
            best.best_correlation = corr;
        }
    }
    best.s = s;
    best.input_n = c.n;
    best.exhaustive = exhaustive;
    best.sign = best.best_correlation < T(0) ? -1 : 1;
    if constexpr (std::is_same_v<T, Rat>) best.advantage = best_abs / 2;
    else best.advantage = best_abs / 2.0;
    best.full_correlation = parity_correlation(c, f);
    best.channel = extract_channel<T>(c, s, best.fixing);
    best.player_outputs.assign(s.size(), {});
    for (int q = 0; q < best.channel.N; ++q) {
        if (best.channel.b[q] == -1) best.referee_outputs.push_back(q);
        else best.player_outputs[best.channel.b[q]].push_back(q);
    }
    return best;
}

template <class T>
void write_reduction(std::ostream& out, const ReductionResult<T>& r) {
    out << "reduction S=";
    for (std::size_t i = 0; i < r.s.size(); ++i) {
        if (i) out << ",";
        out << (r.s[i] + 1);
    }
    out << " fixing=" << mask_to_string(r.fixing, r.input_n - static_cast<int>(r.s.size()));
    out << " sign=" << (r.sign > 0 ? "+" : "-");
    out << " advantage=";
    if constexpr (std::is_same_v<T, Rat>) out << rat_to_decimal(r.advantage);
    else out << double_to_string(r.advantage);
    out << "\n";
    write_channel(out, r.channel);
}

template NsChannelQ extract_channel<Rat>(const Circuit&, const std::vector<int>&, uint32_t);
template NsChannelD extract_channel<double>(const Circuit&, const std::vector<int>&, uint32_t);
template ReductionResult<Rat> best_restriction_search<Rat>(const Circuit&, const BoolFnQ&,
                                                           const std::vector<int>&, uint64_t,
                                                           uint64_t);
template ReductionResult<double> best_restriction_search<double>(const Circuit&, const BoolFnD&,
                                                                 const std::vector<int>&, uint64_t,
                                                                 uint64_t);
template void write_reduction<Rat>(std::ostream&, const ReductionResult<Rat>&);
template void write_reduction<double>(std::ostream&, const ReductionResult<double>&);

}  // namespace qpar
