#if defined(__aarch64__)

#include <arm_neon.h>

#include <complex>
#include <cstddef>

// NEON variants, 2 doubles per vector. Operation order mirrors the scalar
// kernel exactly; compiled without FMA contraction (see CMake flags).

namespace qpar::kern {

using cd = std::complex<double>;

void wht_butterfly_neon(double* v, int n) {
    const std::size_t len = std::size_t(1) << n;
    for (std::size_t h = 1; h < len; h <<= 1) {
        if (h >= 2) {
            for (std::size_t i0 = 0; i0 < len; i0 += 2 * h) {
                for (std::size_t j = i0; j < i0 + h; j += 2) {
                    float64x2_t a = vld1q_f64(v + j);
                    float64x2_t b = vld1q_f64(v + j + h);
                    vst1q_f64(v + j, vaddq_f64(a, b));
                    vst1q_f64(v + j + h, vsubq_f64(a, b));
                }
            }
        } else {
            for (std::size_t i0 = 0; i0 < len; i0 += 2) {
                double a = v[i0];
                double b = v[i0 + 1];
                v[i0] = a + b;
                v[i0 + 1] = a - b;
            }
        }
    }
}

void scale_neon(double* v, std::size_t len, double s) {
    const float64x2_t sv = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) vst1q_f64(v + i, vmulq_f64(vld1q_f64(v + i), sv));
    for (; i < len; ++i) v[i] *= s;
}

namespace {

// one complex number per vector [re im]; multiply by scalar complex u
inline float64x2_t cmul_scalar(float64x2_t x, double ur, double ui) {
    // s1 = [ur*re, ur*im]; s2 = [ui*im, ui*re]; result = [s1.0 - s2.0, s1.1 + s2.1]
    float64x2_t s1 = vmulq_n_f64(x, ur);
    float64x2_t xs = vextq_f64(x, x, 1);
    float64x2_t s2 = vmulq_n_f64(xs, ui);
    const float64x2_t sign = {1.0, -1.0};
    return vsubq_f64(s1, vmulq_f64(s2, sign));
}

}  // namespace

void apply_gate2_neon(cd* psi, int nq, int qa, int qb, const cd* u) {
    const std::size_t len = std::size_t(1) << nq;
    const std::size_t da = std::size_t(1) << qa;
    const std::size_t db = std::size_t(1) << qb;
    const std::size_t dlo = da < db ? da : db;
    const std::size_t dhi = da < db ? db : da;
    double* p = reinterpret_cast<double*>(psi);
    for (std::size_t i2 = 0; i2 < len; i2 += 2 * dhi) {
        for (std::size_t i1 = i2; i1 < i2 + dhi; i1 += 2 * dlo) {
            for (std::size_t i0 = i1; i0 < i1 + dlo; ++i0) {
                float64x2_t x0 = vld1q_f64(p + 2 * i0);
                float64x2_t x1 = vld1q_f64(p + 2 * (i0 + db));
                float64x2_t x2 = vld1q_f64(p + 2 * (i0 + da));
                float64x2_t x3 = vld1q_f64(p + 2 * (i0 + da + db));
                for (int r = 0; r < 4; ++r) {
                    float64x2_t acc = cmul_scalar(x0, u[4 * r].real(), u[4 * r].imag());
                    acc = vaddq_f64(acc, cmul_scalar(x1, u[4 * r + 1].real(), u[4 * r + 1].imag()));
                    acc = vaddq_f64(acc, cmul_scalar(x2, u[4 * r + 2].real(), u[4 * r + 2].imag()));
                    acc = vaddq_f64(acc, cmul_scalar(x3, u[4 * r + 3].real(), u[4 * r + 3].imag()));
                    std::size_t off = (r == 0) ? i0 : (r == 1) ? i0 + db : (r == 2) ? i0 + da : i0 + da + db;
                    vst1q_f64(p + 2 * off, acc);
                }
            }
        }
    }
}

}  // namespace qpar::kern

#endif
