#include "qpar/kernels.hpp"

#include <atomic>

namespace qpar::kern {

namespace {

Backend detect() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
    return Backend::scalar;
#elif defined(__aarch64__)
    return Backend::neon;
#else
    return Backend::scalar;
#endif
}

std::atomic<int> forced{-1};

}  // namespace

Backend active_backend() {
    int f = forced.load(std::memory_order_relaxed);
    if (f >= 0) return static_cast<Backend>(f);
    static const Backend detected = detect();
    return detected;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
        default: return "scalar";
    }
}

void force_backend(Backend b) { forced.store(static_cast<int>(b), std::memory_order_relaxed); }
void reset_backend() { forced.store(-1, std::memory_order_relaxed); }

using cd = std::complex<double>;

namespace {

// complex helpers with a fixed operation order so vector lanes can replicate
// the exact same floating-point results
inline cd cmul(const cd& a, const cd& b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void wht_butterfly_scalar(double* v, int n) {
    const std::size_t len = std::size_t(1) << n;
    for (std::size_t h = 1; h < len; h <<= 1) {
        for (std::size_t i0 = 0; i0 < len; i0 += 2 * h) {
            for (std::size_t j = i0; j < i0 + h; ++j) {
                double a = v[j];
                double b = v[j + h];
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
    }
}

void scale_scalar(double* v, std::size_t len, double s) {
    for (std::size_t i = 0; i < len; ++i) v[i] *= s;
}

void apply_gate2_scalar(cd* psi, int nq, int qa, int qb, const cd* u) {
    const std::size_t len = std::size_t(1) << nq;
    const std::size_t da = std::size_t(1) << qa;
    const std::size_t db = std::size_t(1) << qb;
    const std::size_t dlo = da < db ? da : db;
    const std::size_t dhi = da < db ? db : da;
    for (std::size_t i2 = 0; i2 < len; i2 += 2 * dhi) {
        for (std::size_t i1 = i2; i1 < i2 + dhi; i1 += 2 * dlo) {
            for (std::size_t i0 = i1; i0 < i1 + dlo; ++i0) {
                cd x0 = psi[i0];
                cd x1 = psi[i0 + db];
                cd x2 = psi[i0 + da];
                cd x3 = psi[i0 + da + db];
                // row order |q_a q_b> = 00,01,10,11
                cd y0 = ((cmul(u[0], x0) + cmul(u[1], x1)) + cmul(u[2], x2)) + cmul(u[3], x3);
                cd y1 = ((cmul(u[4], x0) + cmul(u[5], x1)) + cmul(u[6], x2)) + cmul(u[7], x3);
                cd y2 = ((cmul(u[8], x0) + cmul(u[9], x1)) + cmul(u[10], x2)) + cmul(u[11], x3);
                cd y3 = ((cmul(u[12], x0) + cmul(u[13], x1)) + cmul(u[14], x2)) + cmul(u[15], x3);
                psi[i0] = y0;
                psi[i0 + db] = y1;
                psi[i0 + da] = y2;
                psi[i0 + da + db] = y3;
            }
        }
    }
}

#if defined(__x86_64__) || defined(_M_X64)
void wht_butterfly_avx2(double* v, int n);
void scale_avx2(double* v, std::size_t len, double s);
void apply_gate2_avx2(cd* psi, int nq, int qa, int qb, const cd* u);
#endif
#if defined(__aarch64__)
void wht_butterfly_neon(double* v, int n);
void scale_neon(double* v, std::size_t len, double s);
void apply_gate2_neon(cd* psi, int nq, int qa, int qb, const cd* u);
#endif

void wht_butterfly(double* v, int n) {
    switch (active_backend()) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: wht_butterfly_avx2(v, n); return;
#endif
#if defined(__aarch64__)
        case Backend::neon: wht_butterfly_neon(v, n); return;
#endif
        default: wht_butterfly_scalar(v, n); return;
    }
}

void scale(double* v, std::size_t len, double s) {
    switch (active_backend()) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: scale_avx2(v, len, s); return;
#endif
#if defined(__aarch64__)
        case Backend::neon: scale_neon(v, len, s); return;
#endif
        default: scale_scalar(v, len, s); return;
    }
}

void apply_gate2(cd* psi, int nq, int qa, int qb, const cd* u) {
    switch (active_backend()) {
#if defined(__x86_64__) || defined(_M_X64)
        case Backend::avx2: apply_gate2_avx2(psi, nq, qa, qb, u); return;
#endif
#if defined(__aarch64__)
        case Backend::neon: apply_gate2_neon(psi, nq, qa, qb, u); return;
#endif
        default: apply_gate2_scalar(psi, nq, qa, qb, u); return;
    }
}

}  // namespace qpar::kern
