#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crnf/ball.hpp"
#include "crnf/hypersurface.hpp"
#include "test_util.hpp"

using namespace crnf;
using namespace crnf::testutil;

namespace {
bool contains_rat(const RInterval& iv, const Rat& q) {
    RInterval p = RInterval::from_rat(q, 256);
    return mpfr_cmp(iv.lo(), p.hi()) <= 0 && mpfr_cmp(p.lo(), iv.hi()) <= 0;
}
}  // namespace

TEST_CASE("interval arithmetic encloses the exact values") {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
    for (int it = 0; it < 200; ++it) {
        Rat a(num(rng), den(rng)), b(num(rng), den(rng));
        RInterval ia = RInterval::from_rat(a, 64), ib = RInterval::from_rat(b, 64);
        CHECK(contains_rat(ia + ib, a + b));
        CHECK(contains_rat(ia - ib, a - b));
        CHECK(contains_rat(ia * ib, a * b));
        if (b != 0) CHECK(contains_rat(ia * ib.reciprocal(), a / b));
    }
}

TEST_CASE("complex balls follow the exact model") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    for (int it = 0; it < 100; ++it) {
        GaussRat a = gi(num(rng), den(rng), num(rng), den(rng));
        GaussRat b = gi(num(rng), den(rng), num(rng), den(rng));
        CBall ba = CBall::from_gauss(a, 128), bb = CBall::from_gauss(b, 128);
        CBall prod = ba * bb;
        GaussRat exact = a * b;
        CHECK(contains_rat(prod.re(), exact.re));
        CHECK(contains_rat(prod.im(), exact.im));
        if (!b.is_zero()) {
            CBall quot = ba * bb.inverse();
            GaussRat eq = a * b.inverse();
            CHECK(contains_rat(quot.re(), eq.re));
            CHECK(contains_rat(quot.im(), eq.im));
        }
    }
}

TEST_CASE("certified zero and nonzero decisions") {
    CBall z = CBall::from_gauss(GaussRat(0), 64);
    CHECK(z.is_zero());
    CHECK(z.contains_zero());
    CBall tiny = CBall::from_gauss(gi(1, 1000000000, 0, 1), 64);
    CHECK(!tiny.contains_zero());
    CHECK(tiny.certainly_nonzero());
    CBall wide = tiny - tiny;  // contains zero but is not the exact zero
    CHECK(wide.contains_zero());
    RInterval straddle = RInterval::from_rat(Rat(1, 3), 64) - RInterval::from_rat(Rat(1, 3), 64);
    CHECK(straddle.contains_zero());
    CHECK_THROWS_AS((void)straddle.reciprocal(), ToolkitError);
}

TEST_CASE("roots and arguments") {
    RInterval two = RInterval::from_rat(Rat(2), 256);
    RInterval r = root_positive(two, 4);  // 2^(1/4)
    RInterval fourth = r * r * r * r;
    CHECK(contains_rat(fourth, Rat(2)));

    CBall u = CBall::from_gauss(GaussRat(Rat(0), Rat(1)), 256);  // i
    CBall s = root_principal(u, 2);  // e^{i pi / 4}
    CBall sq = s * s;
    CHECK(contains_rat(sq.re(), Rat(0)));
    CHECK(contains_rat(sq.im(), Rat(1)));

    RInterval arg_i = arg_enclosure(GaussRat(Rat(0), Rat(1)), 128);  // pi/2
    RInterval pi_half(128);
    mpfr_const_pi(pi_half.lo_mut(), MPFR_RNDD);
    mpfr_const_pi(pi_half.hi_mut(), MPFR_RNDU);
    mpfr_div_ui(pi_half.lo_mut(), pi_half.lo(), 2, MPFR_RNDD);
    mpfr_div_ui(pi_half.hi_mut(), pi_half.hi(), 2, MPFR_RNDU);
    CHECK(RInterval::overlap(arg_i, pi_half));
}

TEST_CASE("ball series mirror exact series computations") {
    std::mt19937 rng(17);
    for (int it = 0; it < 6; ++it) {
        MultiSeries a = random_series(rng, kQVars, 6, 5);
        MultiSeries b = random_series(rng, kQVars, 6, 5);
        MultiSeries exact = a * b;
        BallSeries ba = to_ball(a, 128), bb = to_ball(b, 128);
        BallSeries prod = BallSeries::mul(ba, bb);
        for (const auto& t : exact.terms()) {
            CBall c = prod.coefficient(t.first);
            CHECK(contains_rat(c.re(), t.second.re));
            CHECK(contains_rat(c.im(), t.second.im));
        }
    }
}

TEST_CASE("transversal inconsistency is reported") {
    // a non-real presentation admits no transversal component
    MultiSeries q = mono(kQVars, 8, {0, 0, 1}, gr(1)) + mono(kQVars, 8, {1, 1, 0}, gr(1));
    BasicQForm<GaussRat> fake{q};  // deliberately bypasses validation
    MultiSeries f = MultiSeries::variable(kMapVars, 8, 0) + MultiSeries::variable(kMapVars, 8, 1);
    std::vector<GaussRat> reals(9, gr(0));
    reals[1] = gr(1);
    CHECK_THROWS_WITH_AS((void)complete_transversal(f, fake, reals),
                         doctest::Contains("Inconsistent"), ToolkitError);
}
