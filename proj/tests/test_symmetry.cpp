#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crnf/symmetry.hpp"
#include "crnf/unimodular.hpp"

using namespace crnf;

namespace {
TorusElement te(long num, long den, int delta) {
    return TorusElement{AngleRational::make(num, den), delta};
}
}  // namespace

TEST_CASE("group_D on stated examples") {
    TorusSubgroup d10 = group_D(1, 0);
    CHECK(d10.finite == std::vector<TorusElement>{te(0, 1, +1), te(0, 1, -1)});

    TorusSubgroup d21 = group_D(2, 1);
    CHECK(d21.finite == std::vector<TorusElement>{te(0, 1, +1), te(1, 1, +1), te(1, 2, -1), te(3, 2, -1)});

    TorusSubgroup d01 = group_D(0, 1);
    CHECK(d01.circle_plus);
    CHECK(!d01.circle_minus);
    CHECK(d01.finite.empty());
}

TEST_CASE("group_D cardinality and defining identity") {
    for (long k = 1; k <= 8; ++k)
        for (long l = 0; l <= 4; ++l) {
            TorusSubgroup d = group_D(k, l);
            CHECK(d.finite.size() == 2 * static_cast<size_t>(k));
            for (const auto& e : d.finite) {
                AngleRational gk = e.gamma.power(k);
                bool dl_neg = (l % 2 == 1) && e.delta < 0;
                CHECK(gk == AngleRational::make(dl_neg ? 1 : 0, 1));
            }
        }
}

TEST_CASE("membership_C on stated examples") {
    CHECK(membership_C(GaussRat(1), Rat(1), 3, 7, 2));
    CHECK(!membership_C(GaussRat::i(), Rat(1), 1, 3, 0));
    CHECK(membership_C(GaussRat(-1), Rat(-1), 1, 2, 2));
}

TEST_CASE("group_N on stated examples") {
    // finite-automorphism family: order 4 = 2(n - alpha)
    TorusSubgroup n1 = group_N({{1, 3, 3}, {4, 6, 1}});
    CHECK(n1.finite.size() == 4);
    CHECK(n1.contains(te(0, 1, -1)));
    CHECK(n1.contains(te(1, 1, +1)));

    // third example: trivial group
    TorusSubgroup n2 = group_N({{1, 2, 1}, {4, 4, 0}});
    CHECK(n2.finite == std::vector<TorusElement>{te(0, 1, +1)});

    // one-parameter example: ten rotations on the positive slice
    TorusSubgroup n3 = group_N({{3, 3, 2}, {1, 11, 3}});
    CHECK(n3.finite.size() == 10);
    for (const auto& e : n3.finite) {
        CHECK(e.delta == +1);
        CHECK(e.gamma.power(10).is_one());
    }
}

TEST_CASE("group_N law consistency with membership_C") {
    LambdaInput lam{{1, 3, 3}, {4, 6, 1}};
    TorusSubgroup n = group_N(lam);
    for (const auto& e : n.finite) {
        auto g = e.gamma.realize();
        REQUIRE(g.has_value());
        for (const auto& t : lam)
            CHECK(membership_C(*g, Rat(e.delta), t.alpha, t.n, t.mu));
    }
}

TEST_CASE("gcd invariants on stated examples") {
    GcdInvariants a = gcd_invariants({{1, 2, 1}, {4, 4, 0}});
    CHECK(a.g == 1);
    CHECK(a.g_plus == 1);
    CHECK(a.g_minus == 0);

    GcdInvariants b = gcd_invariants({{1, 3, 3}, {4, 6, 1}});
    CHECK(b.g == 2);
    CHECK(b.g_plus == 2);
    CHECK(b.g_minus == 0);

    CHECK(ord2(12) == 2u);
    CHECK(!ord2(0).has_value());
}

TEST_CASE("cardinality_N with formula cross-check") {
    CardinalityResult ex3 = cardinality_N({{1, 2, 1}, {4, 4, 0}});
    CHECK(ex3.count == 1ul);
    CHECK(ex3.formula_applicable);
    CHECK(ex3.formula_value == 1);

    CardinalityResult fin = cardinality_N({{1, 3, 3}, {4, 6, 1}});
    CHECK(fin.count == 4ul);
    CHECK(!fin.formula_applicable);  // no even mu

    CardinalityResult mixed = cardinality_N({{1, 3, 0}, {1, 5, 2}});
    CHECK(mixed.count == 2ul);
    CHECK(mixed.formula_applicable);
    CHECK(mixed.formula_value == 2);
}

TEST_CASE("case distinction") {
    CHECK(case_AB({3, 3, 2}, {1, 11, 3}) == CaseAB::CaseA);
    CHECK(case_AB({1, 3, 3}, {4, 6, 1}) == CaseAB::CaseB);
    CHECK_THROWS_AS((void)case_AB({1, 2, 1}, {1, 2, 1}), ToolkitError);
}

TEST_CASE("finiteness decisions on the worked families") {
    FinitenessDecision ex3 = finiteness_decision({{1, 2, 1}, {4, 4, 0}});
    CHECK(ex3.kind == FinitenessDecision::Kind::Finite);
    CHECK(ex3.bound == 2);

    FinitenessDecision fin = finiteness_decision({{1, 3, 3}, {4, 6, 1}});
    CHECK(fin.kind == FinitenessDecision::Kind::Finite);
    CHECK(fin.bound == 4);

    FinitenessDecision onep = finiteness_decision({{3, 3, 2}, {1, 11, 3}});
    CHECK(onep.kind == FinitenessDecision::Kind::JetEmbedOnly);
    CHECK(onep.jet_order == 1);
    CHECK(onep.dim_at_most_one);

    FinitenessDecision single = finiteness_decision({{1, 1, 0}});
    CHECK(single.kind == FinitenessDecision::Kind::NotApplicable);
}

TEST_CASE("triviality decisions on the worked families") {
    // first example family, instance a=3,b=1,p=3,q=5,r=0
    TrivialityDecision ex1 = triviality_decision({{3, 6, 0}, {1, 6, 1}});
    CHECK(ex1.kind == TrivialityDecision::Kind::Trivial);

    TrivialityDecision ex3 = triviality_decision({{1, 2, 1}, {4, 4, 0}});
    CHECK(ex3.kind == TrivialityDecision::Kind::Trivial);

    TrivialityDecision fin = triviality_decision({{1, 3, 3}, {4, 6, 1}});
    CHECK(fin.kind == TrivialityDecision::Kind::NontrivialPossible);
    REQUIRE(fin.witness.has_value());
    CHECK(*fin.witness == te(0, 1, -1));  // (z, -w)
}

TEST_CASE("jet orders") {
    CHECK(jet_order({2, 4, 3}, {4, 4, 2}) == 6);  // l + 1 for the l=5 instance
    CHECK(jet_order({1, 2, 1}, {4, 4, 0}) == 1);
    CHECK(jet_order({3, 3, 2}, {1, 11, 3}) == 1);
}

TEST_CASE("triviality agrees with enumeration on a sweep") {
    for (long k1 = 0; k1 <= 4; ++k1)
        for (long k2 = 0; k2 <= 4; ++k2)
            for (long m1 = 0; m1 <= 3; ++m1)
                for (long m2 = 0; m2 <= 3; ++m2) {
                    LambdaInput lam{{1, 1 + k1, m1}, {2, 2 + k2, m2}};
                    TrivialityDecision d = triviality_decision(lam);
                    if (d.kind == TrivialityDecision::Kind::NotApplicable) continue;
                    auto count = group_N(lam).cardinality();
                    REQUIRE(count.has_value());
                    if (d.kind == TrivialityDecision::Kind::Trivial)
                        CHECK(*count == 1);
                    else
                        CHECK(*count > 1);
                }
}

TEST_CASE("unimodular roots") {
    CHECK(unimodular_root(GaussRat(1), 4) == GaussRat(1));
    CHECK(unimodular_root(GaussRat(-1), 2) == GaussRat::i());
    CHECK(!unimodular_root(GaussRat(-1), 4).has_value());
    CHECK(unimodular_root(GaussRat(-1), 3) == GaussRat(-1));
    // (3+4i)/5 is (pi/conj(pi)) for pi = 2+i: no square root inside Q(i),
    // but its square (-7+24i)/25 recovers it
    GaussRat u(Rat(3, 5), Rat(4, 5));
    CHECK(!unimodular_root(u, 2).has_value());
    GaussRat u2 = u * u;
    auto r = unimodular_root(u2, 2);
    REQUIRE(r.has_value());
    CHECK(*r * *r == u2);
    auto r3 = unimodular_root(u * u * u, 3);
    REQUIRE(r3.has_value());
    CHECK(*r3 * *r3 * *r3 == u * u * u);
}

TEST_CASE("argument comparisons") {
    CHECK(compare_arg_with_angle(GaussRat(1), 0, 1) == 0);
    CHECK(compare_arg_with_angle(GaussRat::i(), 1, 2) == 0);
    CHECK(compare_arg_with_angle(GaussRat(Rat(3, 5), Rat(4, 5)), 1, 2) < 0);
    CHECK(compare_arg_with_angle(GaussRat(Rat(3, 5), Rat(4, 5)), 1, 4) > 0);
    CHECK(compare_args(GaussRat(Rat(3, 5), Rat(4, 5)), GaussRat::i()) < 0);
    CHECK(compare_args(GaussRat(Rat(3, 5), Rat(4, 5)), GaussRat(Rat(3, 5), Rat(4, 5))) == 0);
    CHECK(compare_args(GaussRat(Rat(4, 5), Rat(3, 5)), GaussRat(Rat(3, 5), Rat(4, 5))) < 0);
}

#include "crnf/hypersurface.hpp"
#include "crnf/normalform.hpp"

TEST_CASE("group elements act as automorphisms of the model hypersurface") {
    // one-parameter family: ten rotations, most with angles outside Q(i)
    LambdaInput lam{{3, 3, 2}, {1, 11, 3}};
    MultiSeries phi =
        MultiSeries::monomial(kPhiVars, 16, MultiIndex({3, 3, 2, 0}), GaussRat(1)) +
        MultiSeries::monomial(kPhiVars, 16, MultiIndex({1, 11, 3, 0}), GaussRat(Rat(1, 2))) +
        MultiSeries::monomial(kPhiVars, 16, MultiIndex({11, 1, 3, 0}), GaussRat(Rat(1, 2)));
    QForm q = phi_to_q(validate_phi(phi));
    TorusSubgroup n = group_N(lam);
    REQUIRE(n.finite.size() == 10);
    for (const auto& e : n.finite) {
        if (auto g = e.gamma.realize()) {
            FormalMap h = make_map(MultiSeries::variable(kMapVars, 16, 0).scaled(*g),
                                   MultiSeries::variable(kMapVars, 16, 1).scaled(GaussRat(e.delta)));
            CHECK(check_map(q, q, h).holds);
        } else {
            // symbolic verification: every coefficient slot is fixed by the
            // exact angle multiplier of the rotation
            CHECK(crnf::detail::torus_match(q.q, q.q, e));
        }
    }
}

TEST_CASE("membership in C with interval scalars") {
    CBall one = CBall::from_gauss(GaussRat(1), 128);
    RInterval rone = RInterval::from_rat(Rat(1), 128);
    CHECK(membership_C(one, rone, 3, 7, 2) == Trilean::True);
    CBall i_ball = CBall::from_gauss(GaussRat::i(), 128);
    CHECK(membership_C(i_ball, rone, 1, 3, 0) == Trilean::False);
    // a wide interval straddling the target cannot be certified
    RInterval wide = RInterval::from_rat(Rat(1), 32) +
                     (RInterval::from_rat(Rat(1, 3), 32) - RInterval::from_rat(Rat(1, 3), 32));
    CHECK(membership_C(CBall(wide, RInterval(32)), rone, 2, 2, 1) != Trilean::False);
}

TEST_CASE("group order never exceeds twice the gcd") {
    for (long k1 = 1; k1 <= 5; ++k1)
        for (long k2 = 0; k2 <= 5; ++k2)
            for (long m1 = 0; m1 <= 3; ++m1)
                for (long m2 = 0; m2 <= 3; ++m2) {
                    LambdaInput lam{{1, 1 + k1, m1}, {2, 2 + k2, m2}};
                    GcdInvariants g = gcd_invariants(lam);
                    auto count = group_N(lam).cardinality();
                    if (!count || g.g == 0) continue;
                    CHECK(*count <= 2 * g.g);
                }
}
