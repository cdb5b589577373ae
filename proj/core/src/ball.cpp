#include "crnf/ball.hpp"

#include <algorithm>

namespace crnf {

RInterval RInterval::from_long(long v, mpfr_prec_t prec) {
    RInterval r(prec);
    mpfr_set_si(r.lo_mut(), v, MPFR_RNDD);
    mpfr_set_si(r.hi_mut(), v, MPFR_RNDU);
    return r;
}

RInterval RInterval::from_rat(const Rat& q, mpfr_prec_t prec) {
    RInterval r(prec);
    mpfr_set_q(r.lo_mut(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_mut(), q.get_mpq_t(), MPFR_RNDU);
    return r;
}

RInterval RInterval::point(const Mpfr& v, mpfr_prec_t prec) {
    RInterval r(prec);
    mpfr_set(r.lo_mut(), v.get(), MPFR_RNDD);
    mpfr_set(r.hi_mut(), v.get(), MPFR_RNDU);
    return r;
}

RInterval operator+(const RInterval& a, const RInterval& b) {
    RInterval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_add(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

RInterval operator-(const RInterval& a, const RInterval& b) {
    RInterval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_mut(), a.lo(), b.hi(), MPFR_RNDD);
    mpfr_sub(r.hi_mut(), a.hi(), b.lo(), MPFR_RNDU);
    return r;
}

RInterval RInterval::operator-() const {
    RInterval r(prec_);
    mpfr_neg(r.lo_mut(), hi(), MPFR_RNDD);
    mpfr_neg(r.hi_mut(), lo(), MPFR_RNDU);
    return r;
}

RInterval operator*(const RInterval& a, const RInterval& b) {
    mpfr_prec_t prec = std::max(a.prec(), b.prec());
    RInterval r(prec);
    Mpfr t(prec);
    // lo: minimum of the four endpoint products rounded down
    mpfr_mul(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_mul(t.get(), a.lo(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo(), t.get(), MPFR_RNDD);
    mpfr_mul(t.get(), a.hi(), b.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo(), t.get(), MPFR_RNDD);
    mpfr_mul(t.get(), a.hi(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo(), t.get(), MPFR_RNDD);
    // hi: maximum rounded up
    mpfr_mul(r.hi_mut(), a.lo(), b.lo(), MPFR_RNDU);
    mpfr_mul(t.get(), a.lo(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.hi(), b.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi(), t.get(), MPFR_RNDU);
    mpfr_mul(t.get(), a.hi(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi(), t.get(), MPFR_RNDU);
    return r;
}

RInterval RInterval::reciprocal() const {
    if (contains_zero())
        raise(ErrorCode::Inconclusive, "interval straddles zero, reciprocal not certified");
    RInterval r(prec_);
    mpfr_ui_div(r.lo_mut(), 1, hi(), MPFR_RNDD);
    mpfr_ui_div(r.hi_mut(), 1, lo(), MPFR_RNDU);
    return r;
}

RInterval RInterval::sqrt() const {
    if (mpfr_sgn(lo()) < 0)
        raise(ErrorCode::Inconclusive, "square root of an interval reaching below zero");
    RInterval r(prec_);
    mpfr_sqrt(r.lo_mut(), lo(), MPFR_RNDD);
    mpfr_sqrt(r.hi_mut(), hi(), MPFR_RNDU);
    return r;
}

RInterval RInterval::rootn(unsigned n) const {
    if (mpfr_sgn(lo()) < 0)
        raise(ErrorCode::Inconclusive, "root of an interval reaching below zero");
    RInterval r(prec_);
    mpfr_rootn_ui(r.lo_mut(), lo(), n, MPFR_RNDD);
    mpfr_rootn_ui(r.hi_mut(), hi(), n, MPFR_RNDU);
    return r;
}

std::string RInterval::brief() const {
    char* ls = nullptr;
    char* hs = nullptr;
    mpfr_asprintf(&ls, "%.12Rg", lo());
    mpfr_asprintf(&hs, "%.12Rg", hi());
    std::string s = std::string("[") + ls + ", " + hs + "]";
    mpfr_free_str(ls);
    mpfr_free_str(hs);
    return s;
}

RInterval root_positive(const RInterval& v, unsigned m) {
    if (!v.certainly_positive())
        raise(ErrorCode::Inconclusive, "radicand not certified positive");
    return v.rootn(m);
}

RInterval arg_enclosure(const GaussRat& v, mpfr_prec_t prec) {
    if (v.is_zero()) raise(ErrorCode::ArithmeticError, "argument of zero");
    RInterval re = RInterval::from_rat(v.re, prec);
    RInterval im = RInterval::from_rat(v.im, prec);
    RInterval r(prec);
    // atan2 is monotone in each argument on a fixed quadrant; v is exact so
    // the quadrant is known and the endpoint evaluations bracket the value.
    Mpfr a(prec), b(prec);
    mpfr_atan2(a.get(), im.lo(), re.lo(), MPFR_RNDD);
    mpfr_atan2(b.get(), im.lo(), re.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), a.get(), b.get(), MPFR_RNDD);
    mpfr_atan2(a.get(), im.hi(), re.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo(), a.get(), MPFR_RNDD);
    mpfr_atan2(a.get(), im.hi(), re.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo(), a.get(), MPFR_RNDD);

    mpfr_atan2(a.get(), im.lo(), re.lo(), MPFR_RNDU);
    mpfr_atan2(b.get(), im.lo(), re.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), a.get(), b.get(), MPFR_RNDU);
    mpfr_atan2(a.get(), im.hi(), re.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi(), a.get(), MPFR_RNDU);
    mpfr_atan2(a.get(), im.hi(), re.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi(), a.get(), MPFR_RNDU);

    // shift from (-pi, pi] to [0, 2*pi)
    if (v.im < 0 || (v.im == 0 && v.re < 0)) {
        RInterval two_pi(prec);
        mpfr_const_pi(two_pi.lo_mut(), MPFR_RNDD);
        mpfr_const_pi(two_pi.hi_mut(), MPFR_RNDU);
        mpfr_mul_ui(two_pi.lo_mut(), two_pi.lo(), 2, MPFR_RNDD);
        mpfr_mul_ui(two_pi.hi_mut(), two_pi.hi(), 2, MPFR_RNDU);
        if (v.im < 0) return r + two_pi;
        // negative real axis: atan2 may give either +pi or -pi at endpoints
        if (mpfr_sgn(r.lo()) < 0) return r + two_pi;
    }
    return r;
}

CBall unit_from_angle(long num, long den, mpfr_prec_t prec) {
    RInterval theta(prec);
    mpfr_const_pi(theta.lo_mut(), MPFR_RNDD);
    mpfr_const_pi(theta.hi_mut(), MPFR_RNDU);
    if (num >= 0) {
        mpfr_mul_si(theta.lo_mut(), theta.lo(), num, MPFR_RNDD);
        mpfr_mul_si(theta.hi_mut(), theta.hi(), num, MPFR_RNDU);
    } else {
        Mpfr t(prec);
        mpfr_mul_si(t.get(), theta.hi(), num, MPFR_RNDD);
        mpfr_mul_si(theta.hi_mut(), theta.lo(), num, MPFR_RNDU);
        mpfr_set(theta.lo_mut(), t.get(), MPFR_RNDD);
    }
    mpfr_div_si(theta.lo_mut(), theta.lo(), den, MPFR_RNDD);
    mpfr_div_si(theta.hi_mut(), theta.hi(), den, MPFR_RNDU);

    // cos/sin over the short angle interval: evaluate at both ends and widen
    // by the interval width (|cos'|,|sin'| <= 1).
    Mpfr w(prec);
    mpfr_sub(w.get(), theta.hi(), theta.lo(), MPFR_RNDU);

    RInterval c(prec), s(prec);
    Mpfr c1(prec), c2(prec), s1(prec), s2(prec);
    mpfr_cos(c1.get(), theta.lo(), MPFR_RNDD);
    mpfr_cos(c2.get(), theta.hi(), MPFR_RNDD);
    mpfr_min(c.lo_mut(), c1.get(), c2.get(), MPFR_RNDD);
    mpfr_sub(c.lo_mut(), c.lo(), w.get(), MPFR_RNDD);
    mpfr_cos(c1.get(), theta.lo(), MPFR_RNDU);
    mpfr_cos(c2.get(), theta.hi(), MPFR_RNDU);
    mpfr_max(c.hi_mut(), c1.get(), c2.get(), MPFR_RNDU);
    mpfr_add(c.hi_mut(), c.hi(), w.get(), MPFR_RNDU);

    mpfr_sin(s1.get(), theta.lo(), MPFR_RNDD);
    mpfr_sin(s2.get(), theta.hi(), MPFR_RNDD);
    mpfr_min(s.lo_mut(), s1.get(), s2.get(), MPFR_RNDD);
    mpfr_sub(s.lo_mut(), s.lo(), w.get(), MPFR_RNDD);
    mpfr_sin(s1.get(), theta.lo(), MPFR_RNDU);
    mpfr_sin(s2.get(), theta.hi(), MPFR_RNDU);
    mpfr_max(s.hi_mut(), s1.get(), s2.get(), MPFR_RNDU);
    mpfr_add(s.hi_mut(), s.hi(), w.get(), MPFR_RNDU);

    return CBall(c, s);
}

CBall root_principal(const CBall& v, unsigned m) {
    if (!v.certainly_nonzero())
        raise(ErrorCode::Inconclusive, "root of an interval containing zero");
    mpfr_prec_t prec = std::max(v.re().prec(), v.im().prec());
    // modulus^(1/m)
    RInterval rho = root_positive(v.norm2(), 2 * m);
    // theta/m via atan2 endpoint evaluation (same widening trick as above)
    Mpfr a1(prec), a2(prec), a3(prec), a4(prec);
    RInterval th(prec);
    mpfr_atan2(a1.get(), v.im().lo(), v.re().lo(), MPFR_RNDD);
    mpfr_atan2(a2.get(), v.im().lo(), v.re().hi(), MPFR_RNDD);
    mpfr_atan2(a3.get(), v.im().hi(), v.re().lo(), MPFR_RNDD);
    mpfr_atan2(a4.get(), v.im().hi(), v.re().hi(), MPFR_RNDD);
    mpfr_min(th.lo_mut(), a1.get(), a2.get(), MPFR_RNDD);
    mpfr_min(th.lo_mut(), th.lo(), a3.get(), MPFR_RNDD);
    mpfr_min(th.lo_mut(), th.lo(), a4.get(), MPFR_RNDD);
    mpfr_atan2(a1.get(), v.im().lo(), v.re().lo(), MPFR_RNDU);
    mpfr_atan2(a2.get(), v.im().lo(), v.re().hi(), MPFR_RNDU);
    mpfr_atan2(a3.get(), v.im().hi(), v.re().lo(), MPFR_RNDU);
    mpfr_atan2(a4.get(), v.im().hi(), v.re().hi(), MPFR_RNDU);
    mpfr_max(th.hi_mut(), a1.get(), a2.get(), MPFR_RNDU);
    mpfr_max(th.hi_mut(), th.hi(), a3.get(), MPFR_RNDU);
    mpfr_max(th.hi_mut(), th.hi(), a4.get(), MPFR_RNDU);
    // the enclosure must not wrap across the branch cut
    if (mpfr_cmp(th.lo(), th.hi()) > 0)
        raise(ErrorCode::Inconclusive, "argument enclosure wraps the branch cut");

    mpfr_div_ui(th.lo_mut(), th.lo(), m, MPFR_RNDD);
    mpfr_div_ui(th.hi_mut(), th.hi(), m, MPFR_RNDU);

    Mpfr w(prec);
    mpfr_sub(w.get(), th.hi(), th.lo(), MPFR_RNDU);
    RInterval c(prec), s(prec);
    Mpfr e1(prec), e2(prec);
    mpfr_cos(e1.get(), th.lo(), MPFR_RNDD);
    mpfr_cos(e2.get(), th.hi(), MPFR_RNDD);
    mpfr_min(c.lo_mut(), e1.get(), e2.get(), MPFR_RNDD);
    mpfr_sub(c.lo_mut(), c.lo(), w.get(), MPFR_RNDD);
    mpfr_cos(e1.get(), th.lo(), MPFR_RNDU);
    mpfr_cos(e2.get(), th.hi(), MPFR_RNDU);
    mpfr_max(c.hi_mut(), e1.get(), e2.get(), MPFR_RNDU);
    mpfr_add(c.hi_mut(), c.hi(), w.get(), MPFR_RNDU);
    mpfr_sin(e1.get(), th.lo(), MPFR_RNDD);
    mpfr_sin(e2.get(), th.hi(), MPFR_RNDD);
    mpfr_min(s.lo_mut(), e1.get(), e2.get(), MPFR_RNDD);
    mpfr_sub(s.lo_mut(), s.lo(), w.get(), MPFR_RNDD);
    mpfr_sin(e1.get(), th.lo(), MPFR_RNDU);
    mpfr_sin(e2.get(), th.hi(), MPFR_RNDU);
    mpfr_max(s.hi_mut(), e1.get(), e2.get(), MPFR_RNDU);
    mpfr_add(s.hi_mut(), s.hi(), w.get(), MPFR_RNDU);

    return CBall(c * rho, s * rho);
}

}  // namespace crnf
