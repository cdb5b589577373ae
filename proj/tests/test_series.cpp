#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crnf/series.hpp"
#include "test_util.hpp"

using namespace crnf;
using namespace crnf::testutil;

namespace {
const Vars kZ = {"z"};
const Vars kChi = {"zb"};
const Vars kPhiVars = {"z", "zb", "s"};
const Vars kQVars = {"z", "zb", "tau"};
}  // namespace

TEST_CASE("arithmetic on stated examples") {
    // (z + z^2)^2 at D=3 keeps z^2 + 2z^3 and drops the degree-4 term
    MultiSeries f = mono(kZ, 3, {1}, gr(1)) + mono(kZ, 3, {2}, gr(1));
    MultiSeries p = f * f;
    MultiSeries expect = mono(kZ, 3, {2}, gr(1)) + mono(kZ, 3, {3}, gr(2));
    CHECK(p == expect);

    MultiSeries zero(kZ, 3);
    CHECK(f + zero == f);

    MultiSeries zc = mono(kPhiVars, 5, {1, 1, 0}, gr(1));
    CHECK(zc.scaled(GaussRat::i()).scaled(-GaussRat::i()) == zc);
}

TEST_CASE("variable mismatch is rejected") {
    MultiSeries a(kZ, 3), b(kChi, 3);
    CHECK_THROWS_AS((void)(a + b), ToolkitError);
    CHECK_THROWS_AS((void)(a * b), ToolkitError);
}

TEST_CASE("ring laws on random sparse operands") {
    std::mt19937 rng(12345);
    for (int it = 0; it < 40; ++it) {
        MultiSeries a = random_series(rng, kQVars, 8, 6);
        MultiSeries b = random_series(rng, kQVars, 8, 6);
        MultiSeries c = random_series(rng, kQVars, 8, 6);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("truncation soundness") {
    std::mt19937 rng(777);
    for (int it = 0; it < 25; ++it) {
        MultiSeries a = random_series(rng, kPhiVars, 9, 7);
        MultiSeries b = random_series(rng, kPhiVars, 9, 7);
        CHECK((a * b).truncated(5) == a.truncated(5) * b.truncated(5));
        CHECK((a + b).truncated(5) == a.truncated(5) + b.truncated(5));
    }
}

TEST_CASE("substitute on stated examples") {
    // f = z + z^2 + z^3 at D=3 under z -> z + z^2
    MultiSeries f = mono(kZ, 3, {1}, gr(1)) + mono(kZ, 3, {2}, gr(1)) + mono(kZ, 3, {3}, gr(1));
    MultiSeries g = mono(kZ, 3, {1}, gr(1)) + mono(kZ, 3, {2}, gr(1));
    MultiSeries expect = mono(kZ, 3, {1}, gr(1)) + mono(kZ, 3, {2}, gr(2)) + mono(kZ, 3, {3}, gr(3));
    CHECK(substitute(f, "z", g) == expect);

    // identity binding
    CHECK(substitute(f, "z", MultiSeries::variable(kZ, 3, 0)) == f);

    // single monomial: tau -> tau + 2i z zb
    MultiSeries h = mono(kQVars, 4, {0, 0, 1}, gr(1));
    MultiSeries bind = mono(kQVars, 4, {0, 0, 1}, gr(1)) + mono(kQVars, 4, {1, 1, 0}, gi(0, 1, 2, 1));
    CHECK(substitute(h, "tau", bind) == bind);
}

TEST_CASE("substitute rejects nonzero constant terms") {
    MultiSeries f = mono(kZ, 3, {2}, gr(1));
    MultiSeries g = MultiSeries::constant(kZ, 3, gr(1)) + MultiSeries::variable(kZ, 3, 0);
    CHECK_THROWS_AS((void)substitute(f, "z", g), ToolkitError);
}

TEST_CASE("substitute is truncation sound") {
    std::mt19937 rng(31415);
    for (int it = 0; it < 12; ++it) {
        MultiSeries f = random_series(rng, kZ, 9, 6);
        MultiSeries g = random_series(rng, kZ, 9, 6, true, 1);
        MultiSeries full = substitute(f, "z", g);
        MultiSeries low = substitute(f.truncated(5), "z", g.truncated(5));
        CHECK(full.truncated(5) == low);
    }
}

TEST_CASE("substitute respects composition") {
    std::mt19937 rng(4242);
    for (int it = 0; it < 15; ++it) {
        MultiSeries f = random_series(rng, kZ, 7, 5);
        MultiSeries g = random_series(rng, kZ, 7, 5, true, 1);
        MultiSeries h = random_series(rng, kZ, 7, 5, true, 1);
        MultiSeries lhs = substitute(substitute(f, "z", g), "z", h);
        MultiSeries rhs = substitute(f, "z", substitute(g, "z", h));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("conj_swap on stated examples") {
    // i z^2 zb under z<->zb gives -i z zb^2
    MultiSeries f = mono(kPhiVars, 4, {2, 1, 0}, GaussRat::i());
    MultiSeries expect = mono(kPhiVars, 4, {1, 2, 0}, -GaussRat::i());
    std::array<int, 4> swap_zzb{1, 0, 2, 3};
    CHECK(f.conj_swap(swap_zzb) == expect);

    MultiSeries real_sym = mono(kPhiVars, 4, {1, 1, 0}, gr(1));
    CHECK(real_sym.conj_swap(swap_zzb) == real_sym);

    MultiSeries g = mono(kPhiVars, 4, {3, 0, 0}, gi(1, 1, 2, 1));
    CHECK(g.conj_swap(swap_zzb) == mono(kPhiVars, 4, {0, 3, 0}, gi(1, 1, -2, 1)));
}

TEST_CASE("conj_swap is an involution and multiplicative") {
    std::mt19937 rng(99);
    std::array<int, 4> swap_zzb{1, 0, 2, 3};
    for (int it = 0; it < 20; ++it) {
        MultiSeries a = random_series(rng, kPhiVars, 7, 6);
        MultiSeries b = random_series(rng, kPhiVars, 7, 6);
        CHECK(a.conj_swap(swap_zzb).conj_swap(swap_zzb) == a);
        CHECK((a * b).conj_swap(swap_zzb) == a.conj_swap(swap_zzb) * b.conj_swap(swap_zzb));
    }
}

TEST_CASE("coeff_extract on stated examples") {
    // phi = z^2 zb s/2 + z zb^2 s/2 + z^4 zb^4
    MultiSeries phi = mono(kPhiVars, 9, {2, 1, 1}, gr(1, 2)) + mono(kPhiVars, 9, {1, 2, 1}, gr(1, 2)) +
                      mono(kPhiVars, 9, {4, 4, 0}, gr(1));
    MultiSeries c = coeff_extract(phi, std::vector<std::pair<std::string, unsigned>>{{"z", 1}, {"s", 1}});
    CHECK(c == mono(kChi, 7, {2}, gr(1, 2)));

    MultiSeries absent = coeff_extract(phi, std::vector<std::pair<std::string, unsigned>>{{"z", 3}, {"s", 2}});
    CHECK(absent.is_zero());

    // Q = tau + 2i z zb tau: coefficient of z^1 tau^1
    MultiSeries q = mono(kQVars, 6, {0, 0, 1}, gr(1)) + mono(kQVars, 6, {1, 1, 1}, gi(0, 1, 2, 1));
    MultiSeries qc = coeff_extract(q, std::vector<std::pair<std::string, unsigned>>{{"z", 1}, {"tau", 1}});
    CHECK(qc == mono(kChi, 4, {1}, gi(0, 1, 2, 1)));
}

TEST_CASE("vanishing_order") {
    MultiSeries u = mono(kChi, 8, {2}, gr(1, 2)) + mono(kChi, 8, {5}, gr(1));
    CHECK(vanishing_order(u) == 2u);
    CHECK(!vanishing_order(MultiSeries(kChi, 10)).has_value());
    CHECK(vanishing_order(mono(kChi, 8, {1}, gi(0, 1, 2, 1))) == 1u);
}

TEST_CASE("nth_root on stated examples") {
    MultiSeries one_plus = MultiSeries::constant(kChi, 2, gr(1)) + mono(kChi, 2, {1}, gr(1));
    MultiSeries r = nth_root(one_plus, 2);
    MultiSeries expect =
        MultiSeries::constant(kChi, 2, gr(1)) + mono(kChi, 2, {1}, gr(1, 2)) + mono(kChi, 2, {2}, gr(-1, 8));
    CHECK(r == expect);

    MultiSeries one = MultiSeries::constant(kChi, 6, gr(1));
    CHECK(nth_root(one, 7) == one);

    MultiSeries sq = MultiSeries::constant(kChi, 5, gr(1)) + mono(kChi, 5, {1}, gr(2)) + mono(kChi, 5, {2}, gr(1));
    CHECK(nth_root(sq, 2) == MultiSeries::constant(kChi, 5, gr(1)) + mono(kChi, 5, {1}, gr(1)));

    CHECK_THROWS_AS((void)nth_root(mono(kChi, 4, {1}, gr(1)), 3), ToolkitError);
}

TEST_CASE("nth_root round-trips on random units") {
    std::mt19937 rng(31337);
    for (int it = 0; it < 12; ++it) {
        MultiSeries u = MultiSeries::constant(kChi, 6, gr(1)) + random_series(rng, kChi, 6, 4, true, 1);
        for (unsigned n : {2u, 3u, 5u}) {
            MultiSeries r = nth_root(u, n);
            CHECK(MultiSeries::pow(r, n) == u);
        }
    }
}

TEST_CASE("reciprocal") {
    std::mt19937 rng(2024);
    for (int it = 0; it < 10; ++it) {
        MultiSeries u = MultiSeries::constant(kChi, 7, gr(3, 2)) + random_series(rng, kChi, 7, 4, true, 1);
        MultiSeries r = reciprocal(u);
        CHECK(u * r == MultiSeries::constant(kChi, 7, gr(1)));
    }
}

TEST_CASE("invert_univariate on stated examples") {
    MultiSeries psi = mono(kChi, 3, {1}, gr(1)) + mono(kChi, 3, {2}, gr(1));
    MultiSeries inv = invert_univariate(psi);
    MultiSeries expect = mono(kChi, 3, {1}, gr(1)) + mono(kChi, 3, {2}, gr(-1)) + mono(kChi, 3, {3}, gr(2));
    CHECK(inv == expect);

    MultiSeries lin = mono(kChi, 5, {1}, gi(2, 3, 1, 2));
    CHECK(invert_univariate(lin) == mono(kChi, 5, {1}, gi(2, 3, 1, 2).inverse()));

    CHECK_THROWS_AS((void)invert_univariate(mono(kChi, 4, {2}, gr(1))), ToolkitError);
}

TEST_CASE("invert_univariate round-trips on random maps") {
    std::mt19937 rng(555);
    for (int it = 0; it < 12; ++it) {
        MultiSeries tail = random_series(rng, kChi, 5, 4, true, 2);
        MultiSeries psi = mono(kChi, 5, {1}, gr(it % 3 == 0 ? 1 : 2, 1)) + tail;
        MultiSeries inv = invert_univariate(psi);
        CHECK(substitute(inv, "zb", psi) == mono(kChi, 5, {1}, gr(1)));
        CHECK(substitute(psi, "zb", inv) == mono(kChi, 5, {1}, gr(1)));
    }
}

TEST_CASE("solve_fixed_point on stated examples") {
    // phi = z zb independent of s: Q = tau + 2i z zb after one application
    MultiSeries quad = mono(kQVars, 6, {0, 0, 1}, gr(1)) + mono(kQVars, 6, {1, 1, 0}, gi(0, 1, 2, 1));
    int calls = 0;
    auto builder = [&](const MultiSeries&) {
        ++calls;
        return quad;
    };
    MultiSeries got = solve_fixed_point<GaussRat>(builder, 2, 6, MultiSeries(kQVars, 6));
    CHECK(got == quad);
    CHECK(calls <= 3);

    auto ident = [](const MultiSeries& x) { return x; };
    MultiSeries start = mono(kQVars, 6, {0, 0, 1}, gr(1));
    CHECK(solve_fixed_point<GaussRat>(ident, 1, 6, start) == start);
}

TEST_CASE("solve_fixed_point reports violated contracts") {
    // builder keeps injecting a fresh low-order term: never stabilizes
    int k = 0;
    auto bad = [&](const MultiSeries& x) {
        ++k;
        return x + mono(kZ, 4, {1}, gr(k));
    };
    CHECK_THROWS_AS((void)solve_fixed_point<GaussRat>(bad, 1, 4, MultiSeries(kZ, 4)), ToolkitError);
}

TEST_CASE("canonical text form") {
    MultiSeries phi = mono(kPhiVars, 4, {2, 1, 1}, gr(1, 2)) + mono(kPhiVars, 4, {1, 1, 0}, gi(0, 1, -1, 3));
    std::string txt = canonical_text(phi);
    CHECK(txt ==
          "(0/1)+(-1/3)i * z^1 zb^1 s^0\n"
          "(1/2)+(0/1)i * z^2 zb^1 s^1\n");
    CHECK(canonical_text(MultiSeries(kPhiVars, 4)) == "0\n");
}

TEST_CASE("derivative") {
    MultiSeries q = mono(kQVars, 5, {1, 1, 2}, gr(3)) + mono(kQVars, 5, {2, 0, 0}, gr(1));
    MultiSeries d = q.derivative(2);
    CHECK(d == mono(kQVars, 4, {1, 1, 1}, gr(6)));
}
