#pragma once

#include <mpfr.h>

#include <string>

#include "crnf/errors.hpp"
#include "crnf/rational.hpp"
#include "crnf/series.hpp"

namespace crnf {

// Thin RAII wrapper over one mpfr number.
class Mpfr {
public:
    explicit Mpfr(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Mpfr(const Mpfr& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Mpfr(Mpfr&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Mpfr& operator=(const Mpfr& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Mpfr& operator=(Mpfr&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Mpfr() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

// Closed interval [lo, hi] with mpfr endpoints; all operations round outward.
class RInterval {
public:
    RInterval() : prec_(64), lo_(64), hi_(64) {}
    explicit RInterval(mpfr_prec_t prec) : prec_(prec), lo_(prec), hi_(prec) {}

    static RInterval from_long(long v, mpfr_prec_t prec);
    static RInterval from_rat(const Rat& q, mpfr_prec_t prec);
    static RInterval point(const Mpfr& v, mpfr_prec_t prec);

    mpfr_prec_t prec() const { return prec_; }
    mpfr_srcptr lo() const { return lo_.get(); }
    mpfr_srcptr hi() const { return hi_.get(); }
    mpfr_ptr lo_mut() { return lo_.get(); }
    mpfr_ptr hi_mut() { return hi_.get(); }

    bool certainly_zero() const { return mpfr_zero_p(lo()) && mpfr_zero_p(hi()); }
    bool contains_zero() const { return mpfr_sgn(lo()) <= 0 && mpfr_sgn(hi()) >= 0; }
    bool certainly_positive() const { return mpfr_sgn(lo()) > 0; }
    bool certainly_negative() const { return mpfr_sgn(hi()) < 0; }

    friend RInterval operator+(const RInterval& a, const RInterval& b);
    friend RInterval operator-(const RInterval& a, const RInterval& b);
    friend RInterval operator*(const RInterval& a, const RInterval& b);
    RInterval operator-() const;
    RInterval reciprocal() const;  // requires 0 excluded
    RInterval sqrt() const;        // requires lo >= 0
    RInterval rootn(unsigned n) const;

    // true when the intervals cannot intersect
    static bool certainly_less(const RInterval& a, const RInterval& b) {
        return mpfr_cmp(a.hi(), b.lo()) < 0;
    }
    static bool overlap(const RInterval& a, const RInterval& b) {
        return !(certainly_less(a, b) || certainly_less(b, a));
    }

    std::string brief() const;

private:
    mpfr_prec_t prec_;
    Mpfr lo_, hi_;
};

// Complex rectangle: re + i*im with interval components.
class CBall {
public:
    CBall() : re_(64), im_(64) {}
    CBall(long v) : re_(RInterval::from_long(v, 64)), im_(64) {}
    CBall(RInterval re, RInterval im) : re_(std::move(re)), im_(std::move(im)) {}

    static CBall from_gauss(const GaussRat& g, mpfr_prec_t prec) {
        return CBall(RInterval::from_rat(g.re, prec), RInterval::from_rat(g.im, prec));
    }

    static CBall i() { return CBall(RInterval::from_long(0, 64), RInterval::from_long(1, 64)); }

    const RInterval& re() const { return re_; }
    const RInterval& im() const { return im_; }

    bool is_zero() const { return re_.certainly_zero() && im_.certainly_zero(); }
    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }
    bool certainly_nonzero() const { return !contains_zero(); }

    CBall conj() const { return CBall(re_, -im_); }
    CBall operator-() const { return CBall(-re_, -im_); }

    CBall& operator+=(const CBall& o) {
        re_ = re_ + o.re_;
        im_ = im_ + o.im_;
        return *this;
    }
    CBall& operator-=(const CBall& o) {
        re_ = re_ - o.re_;
        im_ = im_ - o.im_;
        return *this;
    }
    CBall& operator*=(const CBall& o) {
        RInterval r = re_ * o.re_ - im_ * o.im_;
        RInterval i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    RInterval norm2() const { return re_ * re_ + im_ * im_; }

    CBall inverse() const {
        RInterval n = norm2();
        if (n.contains_zero())
            raise(ErrorCode::Inconclusive, "interval straddles zero, inversion not certified");
        RInterval ninv = n.reciprocal();
        return CBall(re_ * ninv, -(im_ * ninv));
    }

    friend CBall operator+(CBall a, const CBall& b) { return a += b; }
    friend CBall operator-(CBall a, const CBall& b) { return a -= b; }
    friend CBall operator*(CBall a, const CBall& b) { return a *= b; }
    friend bool operator==(const CBall& a, const CBall& b) {
        return mpfr_equal_p(a.re_.lo(), b.re_.lo()) && mpfr_equal_p(a.re_.hi(), b.re_.hi()) &&
               mpfr_equal_p(a.im_.lo(), b.im_.lo()) && mpfr_equal_p(a.im_.hi(), b.im_.hi());
    }

    std::string brief() const { return "(" + re_.brief() + ") + (" + im_.brief() + ")i"; }

private:
    RInterval re_, im_;
};

template <>
struct scalar_traits<CBall> {
    static constexpr bool exact = false;
};

inline CBall conj(const CBall& x) { return x.conj(); }

using BallSeries = Series<CBall>;

// Widen an exact series into interval coefficients at the given precision.
inline BallSeries to_ball(const MultiSeries& f, mpfr_prec_t prec) {
    BallSeries r(f.vars(), f.trunc());
    for (const auto& t : f.terms())
        r = BallSeries::add(r, BallSeries::monomial(f.vars(), f.trunc(), t.first,
                                                    CBall::from_gauss(t.second, prec)));
    return r;
}

// Enclosure of arg(v) in [0, 2*pi) for exact nonzero v, at the given precision.
RInterval arg_enclosure(const GaussRat& v, mpfr_prec_t prec);

// Enclosure of exp(i*pi*num/den) at the given precision.
CBall unit_from_angle(long num, long den, mpfr_prec_t prec);

// Principal m-th root of a complex interval that certainly excludes zero.
CBall root_principal(const CBall& v, unsigned m);

inline CBall principal_root_scalar(const CBall& v, unsigned m) { return root_principal(v, m); }

// Real positive m-th root of an interval with lo > 0.
RInterval root_positive(const RInterval& v, unsigned m);

}  // namespace crnf
