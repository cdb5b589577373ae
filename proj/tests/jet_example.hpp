#pragma once

// The jet-dependence instance l=5, a=4, c=2, b=3, d=4: the preimage of the
// quadric under (z,w) -> (z^a w^b + z^c w^d, w^l), solved for
// Im w = s^(2b-l+1) phi(z, zb, s).

#include "crnf/hypersurface.hpp"

namespace crnf::testutil {

struct JetExample {
    static constexpr long ell = 5, a = 4, c = 2, b = 3, d = 4;
    static constexpr long m = 2 * b - ell + 1;  // 2

    PhiForm inner;   // phi solving the implicit relation
    PhiForm phi;     // full defining function s^m * phi
    QForm q;

    // H_t = (z (1 - t w^l)^(-h), w (1 - t w^l)^(-1/l)), h = (l-b)/(a l) = 1/10
    static FormalMap map_h(int trunc, const Rat& t) {
        MultiSeries w = MultiSeries::variable(kMapVars, trunc, 1);
        MultiSeries z = MultiSeries::variable(kMapVars, trunc, 0);
        MultiSeries base = MultiSeries::constant(kMapVars, trunc, GaussRat(1)) -
                           MultiSeries::pow(w, static_cast<unsigned>(ell)).scaled(GaussRat(t));
        MultiSeries tenth = reciprocal(nth_root(base, 10));  // (1 - t w^l)^(-1/10)
        MultiSeries fifth = reciprocal(nth_root(base, 5));   // (1 - t w^l)^(-1/5)
        return make_map(z * tenth, w * fifth);
    }
};

inline JetExample build_jet_example(int trunc) {
    using S = MultiSeries;
    const int D = trunc;
    S z = S::variable(kDefVars, D, 0);
    S zb = S::variable(kDefVars, D, 1);
    S lam = S::variable(kDefVars, D, 2);
    S s = S::variable(kDefVars, D, 3);
    S one = S::constant(kDefVars, D, GaussRat(1));

    // with m = 2: w = s + i s^2 lam on the surface, and
    //   l lam = (1 + s^2 lam^2)^b [ |z|^{2a} + 2 Re(z^c zb^a w^{d-b})
    //            + |z|^{2c} s^{2(d-b)} (1 + s^2 lam^2)^{d-b} ]
    //            - sum_{j>=1} C(l, 2j+1) (-1)^j s^{2j} lam^{2j+1}
    S w_lift = s + (s * s * lam).scaled(GaussRat::i());
    S w_bar = s - (s * s * lam).scaled(GaussRat::i());
    S unit = one + s * s * lam * lam;

    S za = S::pow(z, JetExample::a), zba = S::pow(zb, JetExample::a);
    S zc = S::pow(z, JetExample::c), zbc = S::pow(zb, JetExample::c);
    S bracket = za * zba + zc * zba * w_lift + za * zbc * w_bar + zc * zbc * s * s * unit;
    S odd_tail = (s * s * lam * lam * lam).scaled(GaussRat(Rat(-10))) +
                 (S::pow(s, 4) * S::pow(lam, 5)).scaled(GaussRat(Rat(1)));
    S p = S::pow(unit, 3) * bracket - odd_tail;

    JetExample ex;
    ex.inner = solve_defining(p, JetExample::ell, static_cast<unsigned>(JetExample::a));
    S sm = S::monomial(kPhiVars, D, MultiIndex::unit(2, static_cast<unsigned>(JetExample::m)),
                       GaussRat(1));
    ex.phi = validate_phi(S::mul(sm, ex.inner.phi.with_trunc(D)));
    ex.q = phi_to_q(ex.phi);
    return ex;
}

}  // namespace crnf::testutil
