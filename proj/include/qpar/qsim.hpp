#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qpar/boolfn.hpp"
#include "qpar/errors.hpp"
#include "qpar/kernels.hpp"
#include "qpar/rational.hpp"
#include "qpar/rng.hpp"

namespace qpar {

using Mat4 = std::array<cd, 16>;
using Mat4Q = std::array<CplxQ, 16>;

// 2-qubit gate; row-major 4x4 in basis |q_a q_b> = 00,01,10,11. Gates whose
// entries are exactly rational and exactly unitary also carry an exact matrix
// so circuits built from them can be simulated on the rat path.
struct Gate {
    int qa = 0, qb = 1;  // 0-based
    Mat4 u{};
    bool has_exact = false;
    Mat4Q u_exact{};
    std::string name;     // set for named gates, empty for matrix gates
    bool one_qubit = false;  // named 1-qubit gate embedded as u1 (x) identity

    void check_unitary(double tol) const;
    bool exactly_unitary() const;
};

Gate named_gate2(const std::string& name, int qa, int qb);
// 1-qubit named gate embedded as a 2-qubit gate tensored with identity on the
// partner qubit (H X Y Z S T)
Gate named_gate1(const std::string& name, int q, int partner);
Gate matrix_gate(int qa, int qb, const Mat4Q& entries);

// layered circuit on n input qubits and m ancillas; the last v ancillas hold
// the advice state, the rest start in |0>
struct Circuit {
    int n = 0, m = 0, v = 0, depth = 0;
    std::vector<std::vector<Gate>> layers;  // size == depth
    std::vector<CplxQ> advice;              // size 2^v when v > 0

    int qubits() const { return n + m; }
    bool exact_ok() const;
    void validate(double structural_tol = 1e-12) const;
    Circuit inverse() const;
};

template <class T>
struct OutcomeDistribution {
    int qubits = 0;
    std::vector<T> p;

    void validate(double structural_tol = 1e-12) const {
        if (p.size() != (std::size_t(1) << qubits))
            throw ValidationError("outcome distribution has wrong length");
        if constexpr (std::is_same_v<T, Rat>) {
            Rat s(0);
            for (const Rat& x : p) {
                if (x < 0) throw ValidationError("negative probability");
                s += x;
            }
            if (s != 1) throw ValidationError("probabilities do not sum to 1");
        } else {
            double s = 0;
            for (double x : p) s += x;
            if (std::abs(s - 1.0) > structural_tol)
                throw ValidationError("probabilities do not sum to 1");
        }
    }
};

// statevector after all layers, starting from |x, 0^(m-v), advice>
std::vector<cd> run_statevector(const Circuit& c, uint32_t x);
std::vector<CplxQ> run_statevector_exact(const Circuit& c, uint32_t x);

template <class T>
OutcomeDistribution<T> simulate(const Circuit& c, uint32_t x);

// <x,0,advice| U^dag M_f U |x,0,advice> for a diagonal observable M_f given
// by a BoolFn over all measured qubits
template <class T>
T expectation(const Circuit& c, const BoolFn<T>& f, uint32_t x) {
    if (f.n != c.qubits()) throw ValidationError("expectation: observable arity mismatch");
    OutcomeDistribution<T> d = simulate<T>(c, x);
    T acc(0);
    for (uint32_t y = 0; y < d.p.size(); ++y) acc += d.p[y] * f.values[y];
    return acc;
}

// 2^-n sum_x expectation(c,f,x) * PAR_n(x)
template <class T>
T parity_correlation(const Circuit& c, const BoolFn<T>& f) {
    T acc(0);
    uint32_t inputs = 1u << c.n;
    for (uint32_t x = 0; x < inputs; ++x) {
        T e = expectation(c, f, x);
        acc += ((std::popcount(x) & 1) ? T(-e) : e);
    }
    if constexpr (std::is_same_v<T, Rat>) return acc * rat_pow2(-c.n);
    else return acc * std::ldexp(1.0, -c.n);
}

// tr[Z_[n] U Z_S U^dag] for ancilla-free circuits, via 2^n statevector passes
std::complex<double> heisenberg_trace(const Circuit& c, uint32_t s_mask);
// all 2^n traces at once (index = subset mask)
std::vector<double> heisenberg_trace_table(const Circuit& c);

// output qubits reachable from input qubit j (0-based) through gate couplings
std::vector<int> forward_lightcone(const Circuit& c, int j);

// dense 2^q x 2^q unitary, column c.qubits() <= 12; for small-scale oracles
std::vector<std::vector<cd>> dense_unitary(const Circuit& c);

// ---- generators --------------------------------------------------------

// layered circuit of Haar-like random 2-qubit gates on random disjoint pairs
Circuit random_circuit(int n, int m, int depth, uint64_t seed, double pair_density = 1.0);
// same but every gate is exactly rational and exactly unitary
Circuit random_rational_circuit(int n, int m, int depth, uint64_t seed, double pair_density = 1.0);
// layer l couples qubit q with q xor 2^(l-1); lightcones grow by exactly 2x
Circuit butterfly_circuit(int qubits, int depth, uint64_t seed, bool rational = false);
// nearest-neighbour chain with alternating offsets
Circuit brickwork_circuit(int qubits, int depth, uint64_t seed, bool rational = false);
// n = m inputs pass through; every ancilla is flipped to |1> by an X gate
Circuit append_ones_circuit(int m);

Mat4 random_unitary4(SplitRng& rng);
Mat4Q random_rational_unitary4(SplitRng& rng);

// ---- text format -------------------------------------------------------

Circuit parse_circuit(std::istream& in);
void write_circuit(std::ostream& out, const Circuit& c);

}  // namespace qpar
