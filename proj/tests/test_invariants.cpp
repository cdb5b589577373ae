#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "crnf/invariants.hpp"
#include "test_util.hpp"

using namespace crnf;
using namespace crnf::testutil;

namespace {

// Im w = (Re w) |z|^2 (Re z) + |z|^(2a) with a = 4
MultiSeries example3_phi(int d) {
    return mono(kPhiVars, d, {2, 1, 1}, gr(1, 2)) + mono(kPhiVars, d, {1, 2, 1}, gr(1, 2)) +
           mono(kPhiVars, d, {4, 4, 0}, gr(1));
}

MultiSeries finauto_phi(int d) {
    MultiSeries z = MultiSeries::variable(kPhiVars, d, 0);
    MultiSeries zb = MultiSeries::variable(kPhiVars, d, 1);
    MultiSeries s = MultiSeries::variable(kPhiVars, d, 2);
    MultiSeries rez = (z + zb).scaled(gr(1, 2));
    return s * rez * rez * (z * zb * s * s + MultiSeries::pow(z * zb, 4));
}

// one-parameter family instance alpha=3, mu=2, p=1
MultiSeries oneparam_phi(int d) {
    return mono(kPhiVars, d, {3, 3, 2}, gr(1)) + mono(kPhiVars, d, {1, 11, 3}, gr(1, 2)) +
           mono(kPhiVars, d, {11, 1, 3}, gr(1, 2));
}

MultiSeries quadric_phi(int d) { return mono(kPhiVars, d, {1, 1, 0}, gr(1)); }

MultiSeries random_phi(std::mt19937& rng, int d) {
    MultiSeries g(kPhiVars, d);
    std::uniform_int_distribution<int> num(-10, 10), den(1, 10), ze(1, 3), se(0, 3);
    for (int t = 0; t < 5; ++t) {
        unsigned ez = static_cast<unsigned>(ze(rng)), ezb = static_cast<unsigned>(ze(rng)),
                 es = static_cast<unsigned>(se(rng));
        if (ez + ezb + es > static_cast<unsigned>(d)) continue;
        g = g + mono(kPhiVars, d, {ez, ezb, es}, gi(num(rng), den(rng), num(rng), den(rng)));
    }
    return g + g.conj_swap(kSwapZZb);
}

}  // namespace

TEST_CASE("partial order") {
    CHECK(precedes_strict({1, 1}, {2, 1}));
    CHECK(!precedes_eq({4, 0}, {1, 1}));
    CHECK(!precedes_eq({1, 1}, {4, 0}));
    CHECK(precedes_eq({2, 1}, {2, 1}));
    CHECK(!precedes_strict({2, 1}, {2, 1}));
}

TEST_CASE("support pairs on stated examples") {
    PhiForm ex3 = validate_phi(example3_phi(16));
    CHECK(support_pairs(ex3) == std::vector<InvariantPair>{{1, 1}, {2, 1}, {4, 0}});
    CHECK(support_pairs(validate_phi(quadric_phi(8))) == std::vector<InvariantPair>{{1, 0}});
    CHECK(support_pairs(validate_phi(MultiSeries(kPhiVars, 8))).empty());
}

TEST_CASE("invariant pairs on the worked families") {
    CHECK(invariant_pairs(validate_phi(example3_phi(16))) ==
          std::vector<InvariantPair>{{1, 1}, {4, 0}});
    CHECK(invariant_pairs(validate_phi(finauto_phi(16))) ==
          std::vector<InvariantPair>{{1, 3}, {4, 1}});
    CHECK(invariant_pairs(validate_phi(quadric_phi(8))) == std::vector<InvariantPair>{{1, 0}});
}

TEST_CASE("refined invariant sets and tensors") {
    InvariantProfile ex3 = profile(validate_phi(example3_phi(16)), true);
    CHECK(ex3.lambda == std::vector<Triple>{{1, 2, 1}, {4, 4, 0}});
    CHECK(ex3.provisional.empty());

    InvariantProfile onep = profile(validate_phi(oneparam_phi(16)), true);
    CHECK(onep.lambda == std::vector<Triple>{{1, 11, 3}, {3, 3, 2}});

    InvariantProfile fin = profile(validate_phi(finauto_phi(16)), true);
    CHECK(fin.lambda == std::vector<Triple>{{1, 3, 3}, {4, 6, 1}});

    // quadric: the tensor at (1,1,0) is the Levi form, scalar 2i
    QForm quad = phi_to_q(validate_phi(quadric_phi(8)));
    CHECK(tensor_coeff(quad, Triple{1, 1, 0}) == GaussRat(2) * GaussRat::i());

    // n >= alpha always
    for (const auto& t : fin.lambda) CHECK(t.n >= t.alpha);
}

TEST_CASE("finite type order and contact order") {
    PhiForm ex3 = validate_phi(example3_phi(16));
    CHECK(finite_type_order(ex3) == 4);
    CHECK(contact_order_m0(ex3) == 2);

    PhiForm quad = validate_phi(quadric_phi(8));
    CHECK(finite_type_order(quad) == 1);
    CHECK(contact_order_m0(quad) == 1);

    PhiForm rigid = validate_phi(mono(kPhiVars, 10, {1, 1, 1}, gr(1)));
    CHECK(!finite_type_order(rigid).has_value());  // infinite type to this order
    CHECK(contact_order_m0(rigid) == 2);
}

TEST_CASE("provisional pairs at short truncation") {
    // phi = z^2 zb^2 s^3 at D=8: the slot (5,0) that would dominate (2,3) is
    // entirely invisible (it would need degree 10), so (2,3) stays provisional
    MultiSeries base = mono(kPhiVars, 8, {2, 2, 3}, gr(1));
    InvariantProfile p = profile(validate_phi(base));
    CHECK(p.qm.empty());
    CHECK(p.provisional == std::vector<InvariantPair>{{2, 3}});

    // with absolute (polynomial) semantics nothing is provisional
    InvariantProfile pa = profile(validate_phi(base), true);
    CHECK(pa.qm == std::vector<InvariantPair>{{2, 3}});
    CHECK(pa.provisional.empty());

    // at D = 10 the witness phi' = z^2 zb^2 s^3 + z^5 zb^5 indeed dethrones it
    MultiSeries witness = mono(kPhiVars, 10, {2, 2, 3}, gr(1)) + mono(kPhiVars, 10, {5, 5, 0}, gr(1));
    CHECK(invariant_pairs(validate_phi(witness)) == std::vector<InvariantPair>{{5, 0}});
    // and the truthful version at D = 10 is confirmed
    InvariantProfile p10 = profile(validate_phi(mono(kPhiVars, 10, {2, 2, 3}, gr(1))));
    CHECK(p10.qm == std::vector<InvariantPair>{{2, 3}});
}

TEST_CASE("invariant pairs agree across presentations") {
    std::mt19937 rng(4321);
    for (int it = 0; it < 10; ++it) {
        PhiForm m = validate_phi(random_phi(rng, 8));
        QForm q = phi_to_q(m);
        CHECK(invariant_pairs(m) == invariant_pairs(q));
        // tensor bridge: q-side scalar equals 2i times the phi-side leading coefficient
        InvariantProfile pp = profile(m), pq = profile(q);
        REQUIRE(pp.lambda == pq.lambda);
        for (size_t i = 0; i < pp.tensors.size(); ++i)
            CHECK(pp.tensors[i].value == pq.tensors[i].value);
    }
}

TEST_CASE("four-expansion identity at invariant pairs") {
    QForm q = phi_to_q(validate_phi(example3_phi(12)));
    PhiForm m = q_to_phi(q);
    for (const auto& p : invariant_pairs(q)) {
        MultiSeries qc = pair_coefficient(q.q, p);
        MultiSeries pc = pair_coefficient(m.phi, p);
        int t = std::min(qc.trunc(), pc.trunc());
        CHECK(qc.truncated(t) == pc.scaled(GaussRat(2) * GaussRat::i()).truncated(t));
        // r-expansion: q_{a,m}(chi) = -conj(r_{a,m})(chi)
        MultiSeries rc = coeff_extract(q.q, std::vector<std::pair<int, unsigned>>{
                                                {1, static_cast<unsigned>(p.alpha)},
                                                {2, static_cast<unsigned>(p.mu)}});
        MultiSeries rbar = rc.transplant({"zb"}, {0, -1, -1, -1}, true);
        CHECK(qc.truncated(rbar.trunc()) == (-rbar).truncated(qc.trunc()));
    }
}

TEST_CASE("reality of tensors at n = alpha") {
    // for (alpha, n, mu) with n = alpha the scalar is i times a real rational
    PhiForm onep = validate_phi(oneparam_phi(16));
    InvariantProfile p = profile(onep, true);
    for (size_t i = 0; i < p.lambda.size(); ++i)
        if (p.lambda[i].n == p.lambda[i].alpha) {
            GaussRat v = p.tensors[i].value;
            CHECK(v.re == 0);
        }
}

TEST_CASE("transformation law on stated examples") {
    QForm fin = phi_to_q(validate_phi(finauto_phi(12)));
    FormalMap neg = make_map(MultiSeries::variable(kMapVars, 12, 0).scaled(gr(-1)),
                             MultiSeries::variable(kMapVars, 12, 1));
    TransformCheck t1 = check_transform(fin, fin, neg);
    CHECK(t1.ok());

    QForm quad = phi_to_q(validate_phi(quadric_phi(10)));
    FormalMap rot = make_map(MultiSeries::variable(kMapVars, 10, 0).scaled(GaussRat::i()),
                             MultiSeries::variable(kMapVars, 10, 1));
    TransformCheck t2 = check_transform(quad, quad, rot);
    CHECK(t2.ok());

    TransformCheck t3 = check_transform(fin, fin, identity_map<GaussRat>(12));
    CHECK(t3.ok());
}

TEST_CASE("invariance under linear pullbacks") {
    QForm fin = phi_to_q(validate_phi(finauto_phi(12)));
    std::mt19937 rng(1618);
    std::uniform_int_distribution<int> num(1, 6), den(1, 6), pick(0, 2);
    for (int it = 0; it < 8; ++it) {
        GaussRat c = gi(num(rng), den(rng), pick(rng) == 0 ? num(rng) : 0, den(rng));
        GaussRat r = gr((pick(rng) == 1 ? -1 : 1) * num(rng), den(rng));
        FormalMap h = make_map(MultiSeries::variable(kMapVars, 12, 0).scaled(c),
                               MultiSeries::variable(kMapVars, 12, 1).scaled(r));
        QForm pulled = pullback(fin, h);
        TransformCheck tc = check_transform(pulled, fin, h);
        CHECK(tc.ok());
    }
}
