#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace qpar {

// exact rational scalar used on the 'rat' arithmetic path
using Rat = mpq_class;
using cd = std::complex<double>;

inline Rat rat_abs(const Rat& a) { return a < 0 ? Rat(-a) : a; }

inline double to_double(const Rat& a) { return a.get_d(); }
inline double to_double(double a) { return a; }

// 2^-k as an exact rational
Rat rat_pow2(int k);

// canonicalized fraction; mpq_class(num, den) alone does not reduce
inline Rat frac(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

// parses "p/q", an integer, or a plain decimal such as "-0.75" or "1.5"
Rat parse_rat(const std::string& s);

// canonical "p" or "p/q"
std::string rat_to_string(const Rat& a);

// decimal rendering: exact when the denominator is of the form 2^a 5^b,
// otherwise a shortest round-trip double approximation
std::string rat_to_decimal(const Rat& a);

std::string double_to_string(double x);

// complex number with exact rational parts; enough of the field operations
// for unitary simulation and measurement algebra
struct CplxQ {
    Rat re, im;

    CplxQ() : re(0), im(0) {}
    CplxQ(Rat r) : re(std::move(r)), im(0) {}
    CplxQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    CplxQ(int r) : re(r), im(0) {}

    CplxQ operator+(const CplxQ& o) const { return {re + o.re, im + o.im}; }
    CplxQ operator-(const CplxQ& o) const { return {re - o.re, im - o.im}; }
    CplxQ operator*(const CplxQ& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    CplxQ operator-() const { return {-re, -im}; }
    CplxQ& operator+=(const CplxQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    bool operator==(const CplxQ& o) const { return re == o.re && im == o.im; }

    CplxQ conj() const { return {re, -im}; }
    Rat norm2() const { return re * re + im * im; }
    bool is_zero() const { return re == 0 && im == 0; }

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

inline CplxQ operator*(const Rat& s, const CplxQ& z) { return {s * z.re, s * z.im}; }

// real scalar type belonging to a complex scalar type
template <class C>
struct RealOf;
template <>
struct RealOf<CplxQ> {
    using type = Rat;
};
template <>
struct RealOf<cd> {
    using type = double;
};

}  // namespace qpar
