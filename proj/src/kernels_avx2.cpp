#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <complex>
#include <cstddef>

// AVX2 variants. Compiled with -mavx2 but without FMA so every lane performs
// the same mul/add sequence as the scalar kernel and results stay bit-identical.

namespace qpar::kern {

using cd = std::complex<double>;

void wht_butterfly_avx2(double* v, int n) {
    const std::size_t len = std::size_t(1) << n;
    for (std::size_t h = 1; h < len; h <<= 1) {
        if (h >= 4) {
            for (std::size_t i0 = 0; i0 < len; i0 += 2 * h) {
                for (std::size_t j = i0; j < i0 + h; j += 4) {
                    __m256d a = _mm256_loadu_pd(v + j);
                    __m256d b = _mm256_loadu_pd(v + j + h);
                    _mm256_storeu_pd(v + j, _mm256_add_pd(a, b));
                    _mm256_storeu_pd(v + j + h, _mm256_sub_pd(a, b));
                }
            }
        } else {
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
}

void scale_avx2(double* v, std::size_t len, double s) {
    const __m256d sv = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), sv));
    }
    for (; i < len; ++i) v[i] *= s;
}

namespace {

// lanes hold two complex numbers [re0 im0 re1 im1]; multiply both by the
// scalar complex u: re' = ur*re - ui*im, im' = ur*im + ui*re
inline __m256d cmul_scalar(__m256d x, double ur, double ui) {
    __m256d s1 = _mm256_mul_pd(x, _mm256_set1_pd(ur));
    __m256d xs = _mm256_permute_pd(x, 0b0101);  // [im0 re0 im1 re1]
    __m256d s2 = _mm256_mul_pd(xs, _mm256_set1_pd(ui));
    return _mm256_addsub_pd(s1, s2);
}

inline cd cmul1(const cd& a, const cd& b) {
    return {a.real() * b.real() - a.imag() * b.imag(),
            a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace

void apply_gate2_avx2(cd* psi, int nq, int qa, int qb, const cd* u) {
    const std::size_t len = std::size_t(1) << nq;
    const std::size_t da = std::size_t(1) << qa;
    const std::size_t db = std::size_t(1) << qb;
    const std::size_t dlo = da < db ? da : db;
    const std::size_t dhi = da < db ? db : da;
    double* p = reinterpret_cast<double*>(psi);

    if (dlo >= 2) {
        for (std::size_t i2 = 0; i2 < len; i2 += 2 * dhi) {
            for (std::size_t i1 = i2; i1 < i2 + dhi; i1 += 2 * dlo) {
                for (std::size_t i0 = i1; i0 < i1 + dlo; i0 += 2) {
                    __m256d x0 = _mm256_loadu_pd(p + 2 * i0);
                    __m256d x1 = _mm256_loadu_pd(p + 2 * (i0 + db));
                    __m256d x2 = _mm256_loadu_pd(p + 2 * (i0 + da));
                    __m256d x3 = _mm256_loadu_pd(p + 2 * (i0 + da + db));
                    for (int r = 0; r < 4; ++r) {
                        __m256d acc = cmul_scalar(x0, u[4 * r].real(), u[4 * r].imag());
                        acc = _mm256_add_pd(acc, cmul_scalar(x1, u[4 * r + 1].real(), u[4 * r + 1].imag()));
                        acc = _mm256_add_pd(acc, cmul_scalar(x2, u[4 * r + 2].real(), u[4 * r + 2].imag()));
                        acc = _mm256_add_pd(acc, cmul_scalar(x3, u[4 * r + 3].real(), u[4 * r + 3].imag()));
                        std::size_t off = (r == 0) ? i0 : (r == 1) ? i0 + db : (r == 2) ? i0 + da : i0 + da + db;
                        _mm256_storeu_pd(p + 2 * off, acc);
                    }
                }
            }
        }
        return;
    }

    // one of the qubits is bit 0: groups are not contiguous, fall back per group
    for (std::size_t i2 = 0; i2 < len; i2 += 2 * dhi) {
        for (std::size_t i1 = i2; i1 < i2 + dhi; i1 += 2 * dlo) {
            for (std::size_t i0 = i1; i0 < i1 + dlo; ++i0) {
                cd x0 = psi[i0];
                cd x1 = psi[i0 + db];
                cd x2 = psi[i0 + da];
                cd x3 = psi[i0 + da + db];
                cd y0 = ((cmul1(u[0], x0) + cmul1(u[1], x1)) + cmul1(u[2], x2)) + cmul1(u[3], x3);
                cd y1 = ((cmul1(u[4], x0) + cmul1(u[5], x1)) + cmul1(u[6], x2)) + cmul1(u[7], x3);
                cd y2 = ((cmul1(u[8], x0) + cmul1(u[9], x1)) + cmul1(u[10], x2)) + cmul1(u[11], x3);
                cd y3 = ((cmul1(u[12], x0) + cmul1(u[13], x1)) + cmul1(u[14], x2)) + cmul1(u[15], x3);
                psi[i0] = y0;
                psi[i0 + db] = y1;
                psi[i0 + da] = y2;
                psi[i0 + da + db] = y3;
            }
        }
    }
}

}  // namespace qpar::kern

#endif
