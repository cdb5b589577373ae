#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>

#include "crnf/errors.hpp"

namespace crnf {

using Rat = mpq_class;

inline Rat rat_from_parts(const mpz_class& num, const mpz_class& den) {
    if (den == 0) raise(ErrorCode::ArithmeticError, "zero denominator");
    Rat q(num, den);
    q.canonicalize();
    return q;
}

// Complex number with arbitrary-precision rational real and imaginary parts.
// Always stored with both parts in lowest terms (mpq keeps them canonical).
struct GaussRat {
    Rat re, im;

    GaussRat() : re(0), im(0) {}
    GaussRat(long v) : re(v), im(0) {}
    GaussRat(const Rat& r) : re(r), im(0) { re.canonicalize(); }
    GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }

    static GaussRat i() { return GaussRat(Rat(0), Rat(1)); }
    static GaussRat from_frac(long n, long d) { return GaussRat(Rat(n, d)); }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussRat conj() const { return GaussRat(re, -im); }

    // |.|^2, always an exact rational
    Rat norm2() const { return re * re + im * im; }

    GaussRat operator-() const { return GaussRat(-re, -im); }

    GaussRat& operator+=(const GaussRat& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussRat& operator-=(const GaussRat& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussRat& operator*=(const GaussRat& o) {
        Rat r = re * o.re - im * o.im;
        Rat i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    GaussRat inverse() const {
        if (is_zero()) raise(ErrorCode::ArithmeticError, "inverse of zero");
        Rat n = norm2();
        return GaussRat(re / n, -im / n);
    }

    friend GaussRat operator+(GaussRat a, const GaussRat& b) { return a += b; }
    friend GaussRat operator-(GaussRat a, const GaussRat& b) { return a -= b; }
    friend GaussRat operator*(GaussRat a, const GaussRat& b) { return a *= b; }
    friend GaussRat operator/(const GaussRat& a, const GaussRat& b) { return a * b.inverse(); }
    friend bool operator==(const GaussRat& a, const GaussRat& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

inline GaussRat conj(const GaussRat& x) { return x.conj(); }

inline GaussRat gauss_pow(GaussRat base, long e) {
    if (e < 0) {
        base = base.inverse();
        e = -e;
    }
    GaussRat r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return r;
}

inline Rat rational_power(Rat base, long e) {
    if (e < 0) {
        if (base == 0) raise(ErrorCode::ArithmeticError, "inverse of zero");
        base = 1 / base;
        e = -e;
    }
    Rat r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return r;
}

inline std::string rat_to_string(const Rat& r) {
    return r.get_str();
}

// "<re>" when real, otherwise "<re>+<im>i" / "<re>-<im>i"
inline std::string to_string(const GaussRat& x) {
    std::string s = rat_to_string(x.re);
    if (x.im != 0) {
        if (x.im > 0) s += "+";
        s += rat_to_string(x.im) + "i";
    }
    return s;
}

}  // namespace crnf
