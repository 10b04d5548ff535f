#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops for the f64 path: the Walsh-Hadamard butterfly
// and 2-qubit gate application to a statevector. Scalar reference versions
// are always available; AVX2/NEON variants are selected at runtime and are
// required to produce bit-identical results (same operation order, no FMA
// contraction), which the kernel tests assert.

namespace qpar::kern {

enum class Backend { scalar, avx2, neon };

Backend active_backend();
const char* backend_name(Backend b);

// test hook: pin the backend ('auto' behaviour restored with reset_backend)
void force_backend(Backend b);
void reset_backend();

// one full in-place butterfly pass (no normalization), length 2^n
void wht_butterfly(double* v, int n);
void wht_butterfly_scalar(double* v, int n);

// v[i] *= s for i < len
void scale(double* v, std::size_t len, double s);
void scale_scalar(double* v, std::size_t len, double s);

// applies a 4x4 unitary u (row-major, basis |q_a q_b>) to the 2-qubit
// subspace (qa, qb) of a 2^nq statevector; qa, qb are 0-based bit positions
void apply_gate2(std::complex<double>* psi, int nq, int qa, int qb,
                 const std::complex<double>* u);
void apply_gate2_scalar(std::complex<double>* psi, int nq, int qa, int qb,
                        const std::complex<double>* u);

}  // namespace qpar::kern
