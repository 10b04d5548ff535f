#include "qpar/rational.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>

#include "qpar/errors.hpp"

namespace qpar {

Rat rat_pow2(int k) {
    Rat r(1);
    if (k >= 0) {
        mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(k));
    } else {
        mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<unsigned long>(-k));
    }
    return r;
}

Rat parse_rat(const std::string& s) {
    if (s.empty()) throw ParseError("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0) throw ParseError("bad rational '" + s + "'");
        if (mpz_sgn(r.get_den_mpz_t()) == 0) throw ParseError("zero denominator in '" + s + "'");
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) {
        Rat r;
        if (r.set_str(s, 10) != 0) throw ParseError("bad integer '" + s + "'");
        return r;
    }
    // decimal: sign, integer part, fractional part
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    size_t frac_len = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw ParseError("bad decimal '" + s + "'");
    mpz_class num;
    if (num.set_str(digits, 10) != 0) throw ParseError("bad decimal '" + s + "'");
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& a) { return a.get_str(); }

std::string rat_to_decimal(const Rat& a) {
    // denominator 2^u 5^v renders exactly; pad with the matching 5^u 2^v factor
    mpz_class den = a.get_den();
    unsigned long twos = 0, fives = 0;
    while (mpz_even_p(den.get_mpz_t())) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den == 1) {
        unsigned long shift = twos > fives ? twos : fives;
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, shift);
        mpz_class scaled = a.get_num() * (scale / a.get_den());
        bool neg = scaled < 0;
        mpz_class mag = neg ? mpz_class(-scaled) : scaled;
        std::string s = mag.get_str();
        if (shift == 0) return (neg ? "-" : "") + s;
        if (s.size() <= shift) s.insert(0, shift + 1 - s.size(), '0');
        s.insert(s.size() - shift, ".");
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
        return (neg ? "-" : "") + s;
    }
    return double_to_string(a.get_d());
}

std::string double_to_string(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace qpar
