#include "crnf/unimodular.hpp"

#include <algorithm>
#include <cstdlib>

#include "crnf/ball.hpp"
#include "crnf/errors.hpp"

namespace crnf {

namespace {

struct GaussInt {
    mpz_class re, im;
};

// exact division of g by the Gaussian prime pi = x+iy with norm p, when possible
bool divide_by_prime(GaussInt& g, const mpz_class& x, const mpz_class& y, const mpz_class& p) {
    mpz_class nr = g.re * x + g.im * y;
    mpz_class ni = g.im * x - g.re * y;
    if (nr % p != 0 || ni % p != 0) return false;
    g.re = nr / p;
    g.im = ni / p;
    return true;
}

}  // namespace

GaussRat unit_i_power(long k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return GaussRat(1);
        case 1: return GaussRat::i();
        case 2: return GaussRat(-1);
        default: return -GaussRat::i();
    }
}

std::optional<Rat> rational_root(const Rat& q, unsigned n) {
    if (n == 0) raise(ErrorCode::ArithmeticError, "0th root");
    if (q == 0) return Rat(0);
    bool neg = q < 0;
    if (neg && n % 2 == 0) return std::nullopt;
    mpz_class num = abs(q.get_num());
    mpz_class den = q.get_den();
    mpz_class rn, rd;
    if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), n)) return std::nullopt;
    if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), n)) return std::nullopt;
    Rat r = rat_from_parts(neg ? mpz_class(-rn) : rn, rd);
    return r;
}

std::optional<Rat> gauss_abs(const GaussRat& v) {
    auto r = rational_root(v.norm2(), 2);
    if (!r) return std::nullopt;
    return *r < 0 ? -*r : *r;
}

bool is_unimodular(const GaussRat& v) { return v.norm2() == 1; }

std::optional<GaussRat> unimodular_root(const GaussRat& u, unsigned m) {
    if (!is_unimodular(u)) raise(ErrorCode::ArithmeticError, "root base must be unimodular");
    if (m == 0) raise(ErrorCode::ArithmeticError, "0th root");
    if (m == 1) return u;

    // torsion-only case: the roots of unity inside Q(i)
    for (long t = 0; t < 4; ++t) {
        if (u == unit_i_power(t)) {
            for (long j = 0; j < 4; ++j)
                if ((j * static_cast<long>(m)) % 4 == t % 4) return unit_i_power(j);
            return std::nullopt;
        }
    }

    // write u = (a+bi)/c with a^2+b^2 = c^2, c odd, all prime factors split
    mpz_class dr = u.re.get_den(), di = u.im.get_den();
    mpz_class c;
    mpz_lcm(c.get_mpz_t(), dr.get_mpz_t(), di.get_mpz_t());
    mpz_class a = u.re.get_num() * (c / dr);
    mpz_class b = u.im.get_num() * (c / di);
    GaussInt g{a, b};

    GaussRat zeta(1);
    mpz_class rest = c;
    for (mpz_class p = 3; rest > 1; p += 2) {
        if (p * p > rest) p = rest;
        if (rest % p != 0) continue;
        unsigned kp = 0;
        while (rest % p == 0) {
            rest /= p;
            ++kp;
        }
        // find pi = x+iy with x^2+y^2 = p
        mpz_class x, y;
        bool found = false;
        for (mpz_class yy = 1; yy * yy * 2 <= p && !found; ++yy) {
            mpz_class xx2 = p - yy * yy;
            mpz_class xx;
            if (mpz_root(xx.get_mpz_t(), xx2.get_mpz_t(), 2)) {
                x = xx;
                y = yy;
                found = true;
            }
        }
        if (!found)
            raise(ErrorCode::ArithmeticError,
                  "denominator carries a prime that does not split over the Gaussian integers");
        unsigned e = 0;
        while (divide_by_prime(g, x, y, p)) ++e;
        unsigned f = 2 * kp - e;
        {
            GaussInt tmp = g;
            for (unsigned i = 0; i < f; ++i)
                if (!divide_by_prime(tmp, x, mpz_class(-y), p))
                    raise(ErrorCode::ArithmeticError, "inconsistent Gaussian factorization");
            g = tmp;
        }
        long d = static_cast<long>(e) - static_cast<long>(kp);
        if (d % static_cast<long>(m) != 0) return std::nullopt;
        // (pi / conj(pi))^(d/m) = (pi^2 / p)^(d/m)
        GaussRat ratio(Rat(x * x - y * y, p), Rat(2 * x * y, p));
        zeta *= gauss_pow(ratio, d / static_cast<long>(m));
    }

    // leftover must be a unit i^t
    long t;
    if (g.re == 1 && g.im == 0) t = 0;
    else if (g.re == 0 && g.im == 1) t = 1;
    else if (g.re == -1 && g.im == 0) t = 2;
    else if (g.re == 0 && g.im == -1) t = 3;
    else raise(ErrorCode::ArithmeticError, "Gaussian factorization left a non-unit");

    for (long j = 0; j < 4; ++j) {
        if ((j * static_cast<long>(m)) % 4 == t % 4) {
            GaussRat root = unit_i_power(j) * zeta;
            if (gauss_pow(root, static_cast<long>(m)) != u)
                raise(ErrorCode::ArithmeticError, "unimodular root verification failed");
            return root;
        }
    }
    return std::nullopt;
}

namespace {

// angle grid index in eighths of a turn when arg(v) is a multiple of pi/4
std::optional<long> grid_eighth(const GaussRat& v) {
    bool re0 = v.re == 0, im0 = v.im == 0;
    if (re0 && im0) raise(ErrorCode::ArithmeticError, "argument of zero");
    if (im0) return v.re > 0 ? 0 : 4;
    if (re0) return v.im > 0 ? 2 : 6;
    Rat are = v.re < 0 ? Rat(-v.re) : v.re;
    Rat aim = v.im < 0 ? Rat(-v.im) : v.im;
    if (are != aim) return std::nullopt;
    if (v.re > 0 && v.im > 0) return 1;
    if (v.re < 0 && v.im > 0) return 3;
    if (v.re < 0 && v.im < 0) return 5;
    return 7;
}

}  // namespace

int compare_arg_with_angle(const GaussRat& v, long num, long den) {
    if (den <= 0) raise(ErrorCode::ArithmeticError, "angle denominator must be positive");
    Rat target(num, den);  // in units of pi, expected within [0, 2)
    target.canonicalize();
    if (auto g = grid_eighth(v)) {
        Rat mine(*g, 4);
        mine.canonicalize();
        if (mine < target) return -1;
        if (mine > target) return 1;
        return 0;
    }
    // off-grid: arg(v)/pi is irrational, so interval refinement terminates
    for (mpfr_prec_t prec = 128; prec <= (1 << 22); prec *= 2) {
        RInterval arg = arg_enclosure(v, prec);
        RInterval pi_t(prec);
        mpfr_const_pi(pi_t.lo_mut(), MPFR_RNDD);
        mpfr_const_pi(pi_t.hi_mut(), MPFR_RNDU);
        RInterval tgt = pi_t * RInterval::from_rat(target, prec);
        if (RInterval::certainly_less(arg, tgt)) return -1;
        if (RInterval::certainly_less(tgt, arg)) return 1;
    }
    raise(ErrorCode::ArithmeticError, "argument comparison did not separate");
}

int compare_args(const GaussRat& a, const GaussRat& b) {
    // equal arguments iff a/b is a positive real
    GaussRat q = a * b.conj();
    if (q.im == 0 && q.re > 0) return 0;
    auto ga = grid_eighth(a);
    auto gb = grid_eighth(b);
    if (ga && gb) return *ga < *gb ? -1 : (*ga > *gb ? 1 : 0);
    for (mpfr_prec_t prec = 128; prec <= (1 << 22); prec *= 2) {
        RInterval aa = arg_enclosure(a, prec);
        RInterval bb = arg_enclosure(b, prec);
        if (RInterval::certainly_less(aa, bb)) return -1;
        if (RInterval::certainly_less(bb, aa)) return 1;
    }
    raise(ErrorCode::ArithmeticError, "argument comparison did not separate");
}

}  // namespace crnf
