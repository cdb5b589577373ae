#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crnf/errors.hpp"
#include "crnf/series.hpp"

namespace crnf {

inline const Vars kPhiVars{"z", "zb", "s"};
inline const Vars kQVars{"z", "zb", "tau"};
inline const Vars kMapVars{"z", "w"};
inline const Vars kDefVars{"z", "zb", "lam", "s"};

inline const std::array<int, 4> kSwapZZb{1, 0, 2, 3};

// Im w = phi(z, zb, Re w); phi real with phi(z,0,s) = phi(0,zb,s) = 0.
template <class K>
struct BasicPhiForm {
    Series<K> phi;  // vars (z, zb, s)
    int trunc() const { return phi.trunc(); }
};

// w = Q(z, zb, wbar); Q(z,0,tau) = Q(0,zb,tau) = tau and Q(z,zb,Qbar(zb,z,tau)) = tau.
template <class K>
struct BasicQForm {
    Series<K> q;  // vars (z, zb, tau), includes the leading tau term
    int trunc() const { return q.trunc(); }
};

// Invertible formal map H = (F, G) fixing the origin, in variables (z, w).
template <class K>
struct BasicFormalMap {
    Series<K> F, G;

    K fz0() const { return F.coefficient(MultiIndex::unit(0)); }
    K fw0() const { return F.coefficient(MultiIndex::unit(1)); }
    K gz0() const { return G.coefficient(MultiIndex::unit(0)); }
    K gw0() const { return G.coefficient(MultiIndex::unit(1)); }
    int trunc() const { return std::min(F.trunc(), G.trunc()); }
};

using PhiForm = BasicPhiForm<GaussRat>;
using QForm = BasicQForm<GaussRat>;
using FormalMap = BasicFormalMap<GaussRat>;

template <class K>
bool acceptably_zero_coeff(const K& v) {
    if constexpr (scalar_traits<K>::exact)
        return v.is_zero();
    else
        return v.contains_zero();
}

// residual acceptance: exact zero for exact scalars, enclosure of zero otherwise
template <class K>
bool residual_acceptable(const Series<K>& r) {
    if constexpr (scalar_traits<K>::exact) {
        return r.is_zero();
    } else {
        for (const auto& t : r.terms())
            if (!t.second.contains_zero()) return false;
        return true;
    }
}

// first total degree at which the residual is certainly nonzero (exact: any term)
template <class K>
std::optional<unsigned> residual_failure_degree(const Series<K>& r) {
    for (const auto& t : r.terms()) {
        if constexpr (scalar_traits<K>::exact) {
            return t.first.total();
        } else {
            if (!t.second.contains_zero()) return t.first.total();
        }
    }
    return std::nullopt;
}

template <class K>
BasicFormalMap<K> make_map(Series<K> F, Series<K> G) {
    if (F.vars() != kMapVars || G.vars() != kMapVars)
        raise(ErrorCode::VariableMismatch, "map components must use variables (z, w)");
    if (!F.constant_term().is_zero() || !G.constant_term().is_zero())
        raise(ErrorCode::NotInvertible, "map must fix the origin");
    BasicFormalMap<K> h{std::move(F), std::move(G)};
    K det = h.fz0() * h.gw0() - h.fw0() * h.gz0();
    bool invertible;
    if constexpr (scalar_traits<K>::exact)
        invertible = !det.is_zero();
    else
        invertible = det.certainly_nonzero();
    if (!invertible) raise(ErrorCode::NotInvertible, "linear part is singular");
    return h;
}

template <class K>
BasicPhiForm<K> validate_phi(const Series<K>& phi) {
    if (phi.vars() != kPhiVars)
        raise(ErrorCode::VariableMismatch, "phi form must use variables (z, zb, s)");
    for (const auto& t : phi.terms())
        if ((t.first[0] == 0 || t.first[1] == 0) && !acceptably_zero_coeff(t.second))
            raise(ErrorCode::NormalizationViolation,
                  "term with exponents (" + std::to_string(t.first[0]) + "," +
                      std::to_string(t.first[1]) + "," + std::to_string(t.first[2]) +
                      ") must vanish in normal coordinates");
    Series<K> r = Series<K>::sub(phi.conj_swap(kSwapZZb), phi);
    if (!residual_acceptable(r)) {
        const auto& t = r.terms().front();
        raise(ErrorCode::RealityViolation,
              "coefficient at (" + std::to_string(t.first[0]) + "," + std::to_string(t.first[1]) +
                  "," + std::to_string(t.first[2]) + ") breaks the reality condition");
    }
    return BasicPhiForm<K>{phi};
}

// Qbar as a series: conjugate coefficients, swap the z and zb slots.
template <class K>
Series<K> bar_q(const Series<K>& q) {
    return q.conj_swap(kSwapZZb);
}

template <class K>
BasicQForm<K> validate_q(const Series<K>& q) {
    if (q.vars() != kQVars)
        raise(ErrorCode::VariableMismatch, "q form must use variables (z, zb, tau)");
    Series<K> tau_term = Series<K>::variable(kQVars, q.trunc(), 2);
    for (const auto& t : q.terms()) {
        if (t.first == MultiIndex::unit(2)) continue;
        if (acceptably_zero_coeff(t.second)) continue;
        if (t.first[1] == 0)
            raise(ErrorCode::NormalityViolation,
                  "Q(z,0,tau) = tau fails at degree " + std::to_string(t.first.total()));
        if (t.first[0] == 0)
            raise(ErrorCode::NormalityViolation,
                  "Q(0,zb,tau) = tau fails at degree " + std::to_string(t.first.total()));
    }
    {
        Series<K> tau_dev = Series<K>::sub(
            Series<K>::monomial(kQVars, q.trunc(), MultiIndex::unit(2), q.coefficient(MultiIndex::unit(2))),
            Series<K>::variable(kQVars, q.trunc(), 2));
        if (!residual_acceptable(tau_dev))
            raise(ErrorCode::NormalityViolation, "coefficient of tau must be 1");
    }
    // reality identity Q(z, zb, Qbar(zb, z, tau)) = tau
    Series<K> composed = substitute(q, "tau", bar_q(q));
    Series<K> r = Series<K>::sub(composed, tau_term);
    if (auto d = residual_failure_degree(r))
        raise(ErrorCode::NormalityViolation,
              "reality identity fails first at degree " + std::to_string(*d));
    return BasicQForm<K>{q};
}

// Solve (Q - tau)/2i = phi(z, zb, (Q + tau)/2) for Q.
template <class K>
BasicQForm<K> phi_to_q(const BasicPhiForm<K>& m) {
    const int D = m.phi.trunc();
    Series<K> tau_term = Series<K>::variable(kQVars, D, 2);
    K half = K(2).inverse();
    K two_i = K(2) * K::i();
    auto builder = [&](const Series<K>& q) {
        Series<K> s_slot = Series<K>::add(q, tau_term).scaled(half);
        return Series<K>::add(tau_term, substitute(m.phi, "s", s_slot).scaled(two_i));
    };
    Series<K> q = solve_fixed_point<K>(builder, 2, D, tau_term);
    return validate_q(q);
}

// Solve t = (Q(z, zb, s - i t) - (s - i t)) / 2i for t = phi(z, zb, s).
template <class K>
BasicPhiForm<K> q_to_phi(const BasicQForm<K>& m) {
    const int D = m.q.trunc();
    Series<K> s_term = Series<K>::variable(kPhiVars, D, 2);
    K minus_i = -K::i();
    K inv_2i = (K(2) * K::i()).inverse();
    auto builder = [&](const Series<K>& t) {
        Series<K> tau_slot = Series<K>::add(s_term, t.scaled(minus_i));
        Series<K> q_eval = substitute(m.q, "tau", tau_slot);
        return Series<K>::sub(q_eval, tau_slot).scaled(inv_2i);
    };
    Series<K> phi = solve_fixed_point<K>(builder, 2, D, Series<K>(kPhiVars, D));
    return validate_phi(phi);
}

// Fbar(zb, tau): conjugate coefficients of F(z, w) and rename z->zb, w->tau.
template <class K>
Series<K> bar_into_q_vars(const Series<K>& f) {
    return f.transplant(kQVars, {1, 2, -1, -1}, true);
}

struct MapCheck {
    bool holds = false;
    std::optional<unsigned> fail_degree;
    int checked_to = 0;
};

// Does H map M into M': G(z,Q) = Q'(F(z,Q), Fbar(zb,tau), Gbar(zb,tau)) to truncation.
template <class K>
MapCheck check_map(const BasicQForm<K>& m, const BasicQForm<K>& mp, const BasicFormalMap<K>& h) {
    int T = std::min({m.trunc(), mp.trunc(), h.trunc()});
    Series<K> q = m.q.truncated(T);
    Series<K> lhs = substitute(h.G, "w", q);
    Series<K> a = bar_into_q_vars(h.F).truncated(T);
    Series<K> b = bar_into_q_vars(h.G).truncated(T);
    Series<K> f_on_q = substitute(h.F, "w", q);
    Series<K> rhs = substitute(mp.q, std::vector<std::pair<int, Series<K>>>{
                                         {0, f_on_q}, {1, a}, {2, b}});
    Series<K> r = Series<K>::sub(lhs, rhs);
    MapCheck c;
    c.checked_to = T;
    c.fail_degree = residual_failure_degree(r);
    c.holds = residual_acceptable(r);
    return c;
}

// r'_{beta,nu} coefficient series (in z) of the second expansion of Q'.
template <class K>
struct RCoefficient {
    unsigned beta, nu;
    Series<K> r;  // univariate in z
};

template <class K>
std::vector<RCoefficient<K>> r_expansion(const Series<K>& q) {
    std::vector<RCoefficient<K>> out;
    std::vector<std::pair<unsigned, unsigned>> seen;
    for (const auto& t : q.terms()) {
        if (t.first == MultiIndex::unit(2)) continue;
        std::pair<unsigned, unsigned> bn{t.first[1], t.first[2]};
        bool dup = false;
        for (auto& s : seen)
            if (s == bn) dup = true;
        if (dup) continue;
        seen.push_back(bn);
        out.push_back({bn.first, bn.second,
                       coeff_extract(q, std::vector<std::pair<int, unsigned>>{{1, bn.first}, {2, bn.second}})});
    }
    return out;
}

// min over the support of alpha + mu (infinite type order of contact marker m0)
template <class K>
std::optional<unsigned> m0_of(const Series<K>& q) {
    std::optional<unsigned> m0;
    for (const auto& t : q.terms()) {
        if (t.first == MultiIndex::unit(2)) continue;
        unsigned v = t.first[0] + t.first[2];
        if (!m0 || v < *m0) m0 = v;
    }
    return m0;
}

// Normal-coordinate criterion for H against M': the transversal component must
// reproduce itself from the tangential one,
//   G(z,w) = Gbar(0,w) + sum r'_{beta,nu}(F(z,w)) Fbar(0,w)^beta Gbar(0,w)^nu.
// Returns the residual (zero iff the pulled-back coordinates are normal).
template <class K>
Series<K> normality_residual(const BasicQForm<K>& mp, const BasicFormalMap<K>& h) {
    int T = std::min(mp.trunc(), h.trunc());
    auto conj_univar_w = [&](const Series<K>& fw) {
        // series in (w) -> conjugated series in (z,w)
        return fw.transplant(kMapVars, {1, -1, -1, -1}, true);
    };
    Series<K> f0w = coeff_extract(h.F, std::vector<std::pair<int, unsigned>>{{0, 0}});
    Series<K> g0w = coeff_extract(h.G, std::vector<std::pair<int, unsigned>>{{0, 0}});
    Series<K> fbar0 = conj_univar_w(f0w).truncated(T);
    Series<K> gbar0 = conj_univar_w(g0w).truncated(T);
    Series<K> rhs = gbar0;
    for (const auto& rc : r_expansion(mp.q)) {
        // r' is exact to T - beta - nu; its unknown tail carries z-degree
        // beyond that, and the factors below have valuation beta + nu, so the
        // relabel to T is sound for the final degree-T residual.
        Series<K> term = substitute(rc.r, "z", h.F.truncated(T)).with_trunc(T);
        term = Series<K>::mul(term, Series<K>::pow(fbar0, rc.beta));
        if (rc.nu > 0) term = Series<K>::mul(term, Series<K>::pow(gbar0, rc.nu));
        rhs = Series<K>::add(rhs, term);
    }
    return Series<K>::sub(h.G.truncated(T), rhs);
}

// M = H^{-1}(M'): solve G(z,Q) = Q'(F(z,Q), Fbar, Gbar) for Q. The map must
// preserve normal coordinates; this is verified, not assumed.
template <class K>
BasicQForm<K> pullback(const BasicQForm<K>& mp, const BasicFormalMap<K>& h,
                       const Series<K>* warm_start = nullptr) {
    Series<K> nres = normality_residual(mp, h);
    if (auto d = residual_failure_degree(nres))
        raise(ErrorCode::NormalityViolation,
              "map does not preserve normal coordinates (criterion fails at degree " +
                  std::to_string(*d) + ")");
    int T = std::min(mp.trunc(), h.trunc());
    Series<K> tau_term = Series<K>::variable(kQVars, T, 2);
    Series<K> a = bar_into_q_vars(h.F).truncated(T);
    Series<K> b = bar_into_q_vars(h.G).truncated(T);
    K ginv = h.gw0().inverse();
    auto builder = [&](const Series<K>& q) {
        Series<K> lhs = substitute(h.G, "w", q);
        Series<K> f_on_q = substitute(h.F, "w", q);
        Series<K> rhs = substitute(mp.q, std::vector<std::pair<int, Series<K>>>{
                                             {0, f_on_q}, {1, a}, {2, b}});
        return Series<K>::sub(q, Series<K>::sub(lhs, rhs).scaled(ginv));
    };
    Series<K> init = warm_start ? warm_start->truncated(T) : tau_term;
    Series<K> q = solve_fixed_point<K>(builder, 1, T, init);
    return validate_q(q);
}

// Core of the transversal completion: builds G for the tangential component f
// against the hypersurface whose second-expansion coefficients are given.
template <class K>
Series<K> build_transversal(const Series<K>& f, const std::vector<RCoefficient<K>>& rcs, int T,
                            const std::vector<K>& reals) {
    auto conj_univar_w = [&](const Series<K>& fw) {
        return fw.transplant(kMapVars, {1, -1, -1, -1}, true);
    };
    Series<K> fbar0 = conj_univar_w(coeff_extract(f, std::vector<std::pair<int, unsigned>>{{0, 0}})).truncated(T);

    // U_{beta,nu} = r'_{beta,nu}(F(z,w)) * Fbar(0,w)^beta, independent of G
    struct Piece {
        unsigned nu;
        Series<K> u;
    };
    std::vector<Piece> pieces;
    for (const auto& rc : rcs) {
        // same truncation-relabel argument as in normality_residual
        Series<K> u = substitute(rc.r, "z", f.truncated(T)).with_trunc(T);
        u = Series<K>::mul(u, Series<K>::pow(fbar0, rc.beta));
        if (!u.is_zero()) pieces.push_back({rc.nu, std::move(u)});
    }

    std::vector<K> ghat(static_cast<size_t>(T) + 1, K(0));  // coefficients of G(0,w)
    Series<K> g(kMapVars, T);
    K half = K(2).inverse();
    for (int k = 1; k <= T; ++k) {
        Series<K> gbar0(kMapVars, T);
        for (int j = 1; j < k; ++j)
            gbar0 = Series<K>::add(
                gbar0, Series<K>::monomial(kMapVars, T, MultiIndex::unit(1, static_cast<unsigned>(j)),
                                           ghat[static_cast<size_t>(j)].conj()));
        Series<K> total(kMapVars, T);
        for (const auto& p : pieces) {
            Series<K> term = p.nu == 0 ? p.u : Series<K>::mul(p.u, Series<K>::pow(gbar0, p.nu));
            total = Series<K>::add(total, term);
        }
        Series<K> sk = coeff_extract(total, std::vector<std::pair<int, unsigned>>{{1, static_cast<unsigned>(k)}});
        K sk0 = sk.constant_term();
        // g_k - conj(g_k) = sk0 forces sk0 to be purely imaginary
        K re_part = (sk0 + sk0.conj()) * half;
        bool imag_ok;
        if constexpr (scalar_traits<K>::exact)
            imag_ok = re_part.is_zero();
        else
            imag_ok = re_part.contains_zero();
        if (!imag_ok)
            raise(ErrorCode::Inconsistent,
                  "no transversal component satisfies the reality constraints at order " +
                      std::to_string(k));
        K free_re = static_cast<size_t>(k) < reals.size() ? reals[static_cast<size_t>(k)] : K(0);
        K gk0 = free_re + sk0 * half;
        ghat[static_cast<size_t>(k)] = gk0;
        // G_k(z) = conj(g_k) + S_k(z), re-embedded with its w^k attached; the
        // relabel is sound because the tail of S_k sits beyond z-degree T-k.
        Series<K> gk_z = Series<K>::add(sk, Series<K>::constant(sk.vars(), sk.trunc(), gk0.conj()));
        Series<K> embedded = gk_z.transplant(kMapVars, {0, -1, -1, -1}, false).with_trunc(T);
        embedded = Series<K>::mul(embedded,
                                  Series<K>::monomial(kMapVars, T, MultiIndex::unit(1, static_cast<unsigned>(k)), K(1)));
        g = Series<K>::add(g, embedded);
    }
    return g;
}

// Build the transversal component G for a given tangential component F so that
// the pulled-back coordinates are normal. The stream holds the free real
// parts: reals[k] = Re of the w^k coefficient of G(0, w) (zero when absent).
template <class K>
BasicFormalMap<K> complete_transversal(const Series<K>& f, const BasicQForm<K>& mp,
                                       const std::vector<K>& reals) {
    if (f.vars() != kMapVars)
        raise(ErrorCode::VariableMismatch, "tangential component must use variables (z, w)");
    if (!f.constant_term().is_zero())
        raise(ErrorCode::NotInvertible, "tangential component must vanish at the origin");
    if (f.coefficient(MultiIndex::unit(0)).is_zero())
        raise(ErrorCode::NotInvertible, "F_z(0) must not vanish");
    const int T = std::min(mp.trunc(), f.trunc());
    Series<K> g = build_transversal(f, r_expansion(mp.q), T, reals);
    return make_map(f.truncated(T), g);
}

// Composition H1 after H2 (apply H2 first).
template <class K>
BasicFormalMap<K> compose(const BasicFormalMap<K>& h1, const BasicFormalMap<K>& h2) {
    std::vector<std::pair<int, Series<K>>> binds{{0, h2.F}, {1, h2.G}};
    return make_map(substitute(h1.F, binds), substitute(h1.G, binds));
}

template <class K>
BasicFormalMap<K> identity_map(int trunc) {
    return make_map(Series<K>::variable(kMapVars, trunc, 0), Series<K>::variable(kMapVars, trunc, 1));
}

// Compositional inverse of an invertible formal map.
template <class K>
BasicFormalMap<K> invert_map(const BasicFormalMap<K>& h) {
    const int T = h.trunc();
    K a = h.fz0(), b = h.fw0(), c = h.gz0(), d = h.gw0();
    K det = a * d - b * c;
    K dinv = det.inverse();
    // inverse linear part
    K ia = d * dinv, ib = -b * dinv, ic = -c * dinv, id = a * dinv;
    Series<K> zvar = Series<K>::variable(kMapVars, T, 0);
    Series<K> wvar = Series<K>::variable(kMapVars, T, 1);
    Series<K> fi = Series<K>::add(zvar.scaled(ia), wvar.scaled(ib));
    Series<K> gi = Series<K>::add(zvar.scaled(ic), wvar.scaled(id));
    int budget = T + 2;
    for (int it = 0; it < budget; ++it) {
        std::vector<std::pair<int, Series<K>>> binds{{0, fi}, {1, gi}};
        Series<K> r1 = Series<K>::sub(substitute(h.F, binds), zvar);
        Series<K> r2 = Series<K>::sub(substitute(h.G, binds), wvar);
        if constexpr (scalar_traits<K>::exact) {
            if (r1.is_zero() && r2.is_zero()) return make_map(fi, gi);
        }
        Series<K> nf = Series<K>::sub(fi, Series<K>::add(r1.scaled(ia), r2.scaled(ib)));
        Series<K> ng = Series<K>::sub(gi, Series<K>::add(r1.scaled(ic), r2.scaled(id)));
        fi = std::move(nf);
        gi = std::move(ng);
    }
    if constexpr (scalar_traits<K>::exact) {
        std::vector<std::pair<int, Series<K>>> binds{{0, fi}, {1, gi}};
        if (Series<K>::sub(substitute(h.F, binds), zvar).is_zero() &&
            Series<K>::sub(substitute(h.G, binds), wvar).is_zero())
            return make_map(fi, gi);
        raise(ErrorCode::NoConvergence, "map inversion did not stabilize");
    }
    return make_map(fi, gi);
}

// Solve ell * lam = P(z, zb, lam, s) for lam = phi(z, zb, s). P must have the
// shape z^a zb^a + F with F(z,zb,lam,0) = F(z,0,0,s) = F(0,zb,0,s) = 0 and no
// bare linear lam term.
template <class K>
BasicPhiForm<K> solve_defining(const Series<K>& p, long ell, unsigned a) {
    if (p.vars() != kDefVars)
        raise(ErrorCode::VariableMismatch, "defining relation must use variables (z, zb, lam, s)");
    if (ell == 0) raise(ErrorCode::NotSolvable, "vanishing linear coefficient for lam");
    const int D = p.trunc();
    // shape checks: besides z^a zb^a every term carries s, and terms free of
    // lam carry both z and zb
    for (const auto& t : p.terms()) {
        bool is_lead = t.first[0] == a && t.first[1] == a && t.first[2] == 0 && t.first[3] == 0;
        if (is_lead) continue;
        if (t.first[3] == 0)
            raise(ErrorCode::NotSolvable, "remainder term independent of s outside the leading term");
        if (t.first[2] == 0 && (t.first[0] == 0 || t.first[1] == 0))
            raise(ErrorCode::NotSolvable, "pure s terms must carry both z and zb");
    }
    K scale = K(ell).inverse();
    auto builder = [&](const Series<K>& phi) { return substitute(p, "lam", phi).scaled(scale); };
    Series<K> phi = solve_fixed_point<K>(builder, 1, D, Series<K>(kPhiVars, D));
    return validate_phi(phi);
}

}  // namespace crnf
