#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crnf/ball.hpp"
#include "crnf/errors.hpp"
#include "crnf/hypersurface.hpp"
#include "crnf/invariants.hpp"
#include "crnf/symmetry.hpp"
#include "crnf/unimodular.hpp"

namespace crnf {

// ---------------------------------------------------------------------------
// scalar helpers shared by the exact and ball instantiations

template <class K>
bool certainly_nonzero_scalar(const K& v) {
    if constexpr (scalar_traits<K>::exact)
        return !v.is_zero();
    else
        return v.certainly_nonzero();
}

template <class K>
bool acceptably_zero_scalar(const K& v) {
    if constexpr (scalar_traits<K>::exact)
        return v.is_zero();
    else
        return v.contains_zero();
}

template <class K>
K scalar_pow(K base, long e) {
    if (e < 0) {
        base = base.inverse();
        e = -e;
    }
    K r(1);
    while (e > 0) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return r;
}

// closed-form pullback under (gamma z, delta w) with |gamma| = 1, delta = +-1:
// each coefficient at (a, m, mu) picks up gamma^a conj(gamma)^m delta^(mu-1).
template <class K>
Series<K> pullback_torus(const Series<K>& q, const K& gamma, int delta) {
    Series<K> out(q.vars(), q.trunc());
    K gbar = gamma.conj();
    for (const auto& t : q.terms()) {
        long a = t.first[0], m = t.first[1], mu = t.first[2];
        K mult = scalar_pow(gamma, a) * scalar_pow(gbar, m);
        if (delta < 0 && ((mu - 1) % 2 != 0)) mult = -mult;
        out = Series<K>::add(out, Series<K>::monomial(q.vars(), q.trunc(), t.first, t.second * mult));
    }
    return out;
}

// closed-form pullback under H = (f(z), r w) with f(0) = 0, r real:
// r Q = Q'(f(z), fbar(zb), r tau).
template <class K>
Series<K> pullback_tangential(const Series<K>& qp, const Series<K>& f_univar_z, const K& r) {
    int T = std::min(qp.trunc(), f_univar_z.trunc());
    Series<K> fz = f_univar_z.transplant(kQVars, {0, -1, -1, -1}, false).truncated(T);
    Series<K> fb = f_univar_z.transplant(kQVars, {1, -1, -1, -1}, true).truncated(T);
    Series<K> rt = Series<K>::variable(kQVars, T, 2).scaled(r);
    Series<K> composed = substitute(qp.truncated(T), std::vector<std::pair<int, Series<K>>>{
                                                         {0, fz}, {1, fb}, {2, rt}});
    return composed.scaled(r.inverse());
}

// ---------------------------------------------------------------------------
// result types

template <class K>
struct StepRecord {
    int k = 0;
    Rat pivot_determinant;          // D_k of the three-equation system
    bool degenerate = false;        // k in K: the free parameter enters here
    K f_w;                          // solved coefficient of w^k in F
    K f_zw;                         // solved coefficient of z w^k in F
    std::vector<std::pair<unsigned, K>> f_high;  // (a, coefficient of z^a w^k)
    K s_next;                       // Re part of the w^{k+1} coefficient of G(0,w)
};

template <class K>
struct BasicNormalizationResult {
    BasicQForm<K> q_nf;
    BasicFormalMap<K> map;  // sends normal-form coordinates to the input coordinates
    Triple t, tt;           // chosen triples (alpha,n,mu) and (alpha~,n~,mu~)
    InvariantPair prime_pair;  // the pair with alpha' > 1 used for the cross condition
    long n_prime = 0;
    CaseAB case_kind = CaseAB::CaseB;
    K second_leading;       // i c eps: the chi^n~ coefficient of q_{alpha~,mu~}
    std::optional<Rat> c_squared;  // |second_leading|^2 when exact
    std::optional<long> lambda;    // degenerate step index, when it is an integer >= 1
    std::vector<long> exceptional_set;  // K: empty or {lambda}
    std::optional<Rat> free_param;      // supplied s_{lambda+1}
    std::vector<StepRecord<K>> steps;
    std::vector<std::string> trace;     // certified decisions, for cross-precision checks
    bool ball_mode = false;
    mpfr_prec_t precision = 0;
};

using NormalizationResult = BasicNormalizationResult<GaussRat>;

struct NormalizeOptions {
    std::optional<Triple> triple_choice;   // which triple plays (alpha, n, mu)
    TorusElement residual{AngleRational::make(0, 1), +1};  // extra element of C cap C
    std::optional<Rat> free_param;         // s_{lambda+1} when the set K is nonempty
    // The stored coefficient of the leading invariant pair is the whole
    // series (true for polynomial defining functions, whose invariant-pair
    // coefficients transfer exactly). Keeps the straightening at full order.
    bool leading_coefficient_complete = false;
};

// ---------------------------------------------------------------------------
// choice of triples and the degenerate index

struct NormalformMeta {
    Triple t, tt;
    InvariantPair prime_pair;
    long n_prime = 0;
    CaseAB case_kind = CaseAB::CaseB;
    std::optional<long> lambda;
    std::vector<long> exceptional_set;
    InvariantProfile profile;
};

inline Rat pivot_determinant(const Triple& t, const Triple& tt, long k) {
    long S = t.alpha + t.n, St = tt.alpha + tt.n;
    return rat_from_parts((St - S) * (k + 1) + S * tt.mu - St * t.mu, k + 1);
}

inline NormalformMeta normalform_meta(const QForm& m, const NormalizeOptions& opt) {
    NormalformMeta meta;
    meta.profile = profile(m);
    const auto& lam = meta.profile.lambda;
    if (lam.size() < 2)
        raise(ErrorCode::HypothesesNotMet, "need at least two confirmed invariant pairs");
    std::optional<Triple> chosen;
    if (opt.triple_choice) {
        for (const auto& t : lam)
            if (t == *opt.triple_choice && t.alpha != t.n) chosen = t;
        if (!chosen)
            raise(ErrorCode::HypothesesNotMet,
                  "requested triple is not an admissible element of the invariant set");
    } else {
        for (const auto& t : lam)
            if (t.alpha != t.n && (!chosen || t < *chosen)) chosen = t;
        if (!chosen) raise(ErrorCode::HypothesesNotMet, "need a triple with n != alpha");
    }
    meta.t = *chosen;
    std::optional<Triple> second;
    for (const auto& t : lam)
        if (!(t == *chosen) && (!second || t < *second)) second = t;
    meta.tt = *second;
    meta.case_kind = case_AB(meta.t, meta.tt);
    // the pair with alpha' > 1 (one always exists when there are two pairs)
    if (meta.tt.alpha > 1) {
        meta.prime_pair = {meta.tt.alpha, meta.tt.mu};
        meta.n_prime = meta.tt.n;
    } else {
        meta.prime_pair = {meta.t.alpha, meta.t.mu};
        meta.n_prime = meta.t.n;
    }
    long S = meta.t.alpha + meta.t.n, St = meta.tt.alpha + meta.tt.n;
    if (S != St) {
        Rat lam_frac = rat_from_parts(St * meta.t.mu - S * meta.tt.mu, St - S) - 1;
        if (lam_frac.get_den() == 1 && lam_frac.get_num() >= 1) {
            meta.lambda = static_cast<long>(lam_frac.get_num().get_si());
            meta.exceptional_set.push_back(*meta.lambda);
        }
    }
    return meta;
}

// membership of a torus element in C(alpha, n, mu) by exact angle arithmetic
inline bool torus_in_C(const TorusElement& e, const Triple& t) {
    AngleRational phase = e.gamma.power(t.alpha - t.n);
    if (e.delta < 0 && ((t.mu - 1) % 2 != 0)) phase = phase * AngleRational::make(1, 1);
    return phase.is_one();
}

// ---------------------------------------------------------------------------
// the epsilon orbit: candidates eps0 * conj(gamma)^{n~-alpha~} sign(delta)^{mu~-1}
// over (gamma, delta) ranging through C(alpha,n,mu)

struct EpsCandidate {
    AngleRational rotation;   // the orbit factor omega
    AngleRational gamma;      // a realizing first-slot rotation
    int delta = 1;
};

inline std::vector<EpsCandidate> eps_orbit(const Triple& t, const Triple& tt) {
    long m = t.n - t.alpha;
    std::vector<EpsCandidate> out;
    auto push = [&](const AngleRational& gamma, int delta) {
        AngleRational omega = gamma.power(-(tt.n - tt.alpha));
        if (delta < 0 && ((tt.mu - 1) % 2 != 0)) omega = omega * AngleRational::make(1, 1);
        EpsCandidate c{omega, gamma, delta};
        for (const auto& e : out)
            if (e.rotation == c.rotation) return;  // same candidate value
        out.push_back(c);
    };
    for (long p = 0; p < m; ++p) push(AngleRational::make(2 * p, m), +1);
    for (long p = 0; p < m; ++p) {
        // delta = -1 requires (n-alpha) arg gamma = (mu-1) pi mod 2 pi
        long parity = ((t.mu - 1) % 2 + 2) % 2;
        push(AngleRational::make(parity + 2 * p, m), -1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// the normalization engine, shared between exact scalars and interval scalars

template <class K>
class NormalformEngine {
public:
    NormalformEngine(const QForm& input, int degree, NormalizeOptions opt, mpfr_prec_t prec)
        : input_(input), opt_(std::move(opt)), prec_(prec) {
        meta_ = normalform_meta(input_, opt_);
        if (!torus_in_C(opt_.residual, meta_.t) || !torus_in_C(opt_.residual, meta_.tt))
            raise(ErrorCode::HypothesesNotMet, "residual choice is not in the stabilizer");
        D_ = std::min(degree, input_.trunc());
    }

    BasicNormalizationResult<K> run() {
        prelim();
        steps();
        return assemble();
    }

    // stop after the leading-coefficient straightening: q_{a,mu} = 2i chi^n
    // and the second pair reduced to i c eps chi^n~ + higher
    BasicNormalizationResult<K> run_preliminary() {
        prelim();
        return assemble();
    }

private:
    using S = Series<K>;

    K from_rat(const Rat& r) const {
        if constexpr (scalar_traits<K>::exact)
            return GaussRat(r);
        else
            return CBall::from_gauss(GaussRat(r), prec_);
    }
    K from_gauss(const GaussRat& g) const {
        if constexpr (scalar_traits<K>::exact)
            return g;
        else
            return CBall::from_gauss(g, prec_);
    }
    K re_of(const K& v) const { return (v + v.conj()) * from_rat(Rat(1, 2)); }

    static S pair_coeff(const S& q, long alpha, long mu) {
        return coeff_extract(q, std::vector<std::pair<int, unsigned>>{
                                    {0, static_cast<unsigned>(alpha)},
                                    {2, static_cast<unsigned>(mu)}});
    }

    // ---- preliminary normalization -------------------------------------
    void prelim() {
        const Triple t = meta_.t, tt = meta_.tt;
        const long A = t.alpha + t.n, B = t.mu - 1;
        const long At = tt.alpha + tt.n, Bt = tt.mu - 1;

        GaussRat v1 = pair_coefficient(input_.q, {t.alpha, t.mu})
                          .coefficient(MultiIndex::unit(0, static_cast<unsigned>(t.n)));
        GaussRat v2 = pair_coefficient(input_.q, {tt.alpha, tt.mu})
                          .coefficient(MultiIndex::unit(0, static_cast<unsigned>(tt.n)));
        if (v1.is_zero() || v2.is_zero())
            raise(ErrorCode::InsufficientTruncation, "leading invariant coefficients not visible");
        GaussRat c1 = v1 * (-GaussRat::i());  // q_{a,mu} = i c1 chi^n + ...
        Rat n1 = v1.norm2(), n2 = v2.norm2();

        // moduli: rho^(A) * |gw|^(B) = 2/|c1|, and in Case B also the second row
        Rat rho2, gw2;  // squares of the moduli
        if (meta_.case_kind == CaseAB::CaseB) {
            long det = A * Bt - At * B;
            // rho^(2 det) = (4/n1)^(Bt) * (4/n2)^(-B); gw^(2 det) = (4/n1)^(-At) * (4/n2)^(A)
            auto solve_power = [&](long e1, long e2, const char* what) -> Rat {
                Rat x = rational_power(Rat(4) / n1, e1) * rational_power(Rat(4) / n2, e2);
                long root = 2 * det;
                if (root < 0) {
                    x = 1 / x;
                    root = -root;
                }
                auto rt = rational_root(x, static_cast<unsigned>(root));
                if (!rt) {
                    if constexpr (scalar_traits<K>::exact)
                        raise(ErrorCode::NonRationalScaling,
                              std::string("required modulus for ") + what +
                                  " is an irrational root of " + rat_to_string(x));
                    return Rat(0);  // ball mode recomputes below
                }
                return *rt * *rt;
            };
            if constexpr (scalar_traits<K>::exact) {
                rho2 = solve_power(Bt, -B, "|Fz(0)|");
                gw2 = solve_power(-At, A, "|Gw(0)|");
            } else {
                (void)solve_power;
            }
            trace_.push_back("case B: both moduli pinned");
        } else {
            // Case A convention: |Gw(0)| = 1, rho^(2A) = 4/n1
            gw2 = Rat(1);
            if constexpr (scalar_traits<K>::exact) {
                auto rt = rational_root(Rat(4) / n1, static_cast<unsigned>(2 * A));
                if (!rt)
                    raise(ErrorCode::NonRationalScaling,
                          "required modulus |Fz(0)| = (2/|c|)^(1/(alpha+n)) is irrational");
                rho2 = *rt * *rt;
            }
            trace_.push_back("case A: |Gw(0)| pinned to 1");
        }

        // phases: zeta^(n-alpha) = c1 rho^A (sigma gw)^(mu-1) / 2
        long m = t.n - t.alpha;
        K fz, gw;
        if constexpr (scalar_traits<K>::exact) {
            auto rho = rational_root(rho2, 2), gwp = rational_root(gw2, 2);
            if (!rho || !gwp)
                raise(ErrorCode::NonRationalScaling, "modulus square has no rational root");
            std::optional<GaussRat> zeta;
            int sigma = +1;
            for (int sg : {+1, -1}) {
                GaussRat u = c1 * GaussRat(rational_power(*rho, A)) *
                             GaussRat(rational_power(sg > 0 ? *gwp : -*gwp, t.mu - 1)) *
                             GaussRat(Rat(1, 2));
                if (!is_unimodular(u))
                    raise(ErrorCode::NonRationalScaling,
                          "phase target is not unimodular over the rationals");
                if (auto r = unimodular_root(u, static_cast<unsigned>(m))) {
                    zeta = *r;
                    sigma = sg;
                    break;
                }
            }
            if (!zeta)
                raise(ErrorCode::NonRationalScaling,
                      "phase equation has no Gaussian-rational solution");
            fz = *zeta * GaussRat(*rho);
            gw = GaussRat(sigma > 0 ? *gwp : -*gwp);
            trace_.push_back(std::string("prelim sign of Gw(0): ") + (sigma > 0 ? "+" : "-"));
        } else {
            // interval mode: moduli as certified roots, principal phase root
            RInterval n1i = RInterval::from_rat(n1, prec_), n2i = RInterval::from_rat(n2, prec_);
            RInterval four = RInterval::from_rat(Rat(4), prec_);
            RInterval rho_i(prec_), gw_i(prec_);
            auto ipow = [&](RInterval base, long e) {
                RInterval r = RInterval::from_rat(Rat(1), prec_);
                bool inv = e < 0;
                if (inv) e = -e;
                for (long i = 0; i < e; ++i) r = r * base;
                return inv ? r.reciprocal() : r;
            };
            if (meta_.case_kind == CaseAB::CaseB) {
                long det = A * Bt - At * B;
                RInterval x = ipow(four * n1i.reciprocal(), Bt) * ipow(four * n2i.reciprocal(), -B);
                RInterval y = ipow(four * n1i.reciprocal(), -At) * ipow(four * n2i.reciprocal(), A);
                if (det < 0) {
                    x = x.reciprocal();
                    y = y.reciprocal();
                }
                unsigned root = static_cast<unsigned>(2 * std::abs(det));
                rho_i = root_positive(x, root);
                gw_i = root_positive(y, root);
            } else {
                rho_i = root_positive(four * n1i.reciprocal(), static_cast<unsigned>(2 * A));
                gw_i = RInterval::from_rat(Rat(1), prec_);
            }
            CBall u = CBall::from_gauss(c1, prec_);
            RInterval rhoA = ipow(rho_i, A), gwB = ipow(gw_i, t.mu - 1);
            u *= CBall(rhoA * gwB, RInterval(prec_));
            u *= CBall::from_gauss(GaussRat(Rat(1, 2)), prec_);
            CBall zeta = root_principal(u, static_cast<unsigned>(m));
            fz = zeta * CBall(rho_i, RInterval(prec_));
            gw = CBall(gw_i, RInterval(prec_));
            trace_.push_back("prelim moduli and phase via certified interval roots");
        }

        // psi: q'_{a,mu}(chi) = v1 * chi^n * unit(chi), psi = chi * unit^(1/n)
        S qk = to_mode(input_.q);
        S qc = pair_coeff(qk, t.alpha, t.mu);
        S unit = shift_down(qc, static_cast<unsigned>(t.n)).scaled(from_gauss(v1).inverse());
        // a complete pair coefficient makes the unit factor complete, so the
        // root recurrence may run to the full input order
        if (opt_.leading_coefficient_complete) unit = unit.with_trunc(input_.trunc());
        S psi = S::mul(S::variable(unit.vars(), unit.trunc() + 1 > 0 ? unit.trunc() + 1 : 1, 0)
                           .with_trunc(unit.trunc() + 1),
                       unit.with_trunc(unit.trunc() + 1));
        psi = nth_root_shifted(psi, static_cast<unsigned>(t.n));
        // f(z) = psibar^{-1}(fz * z)
        S psibar_inv = invert_univariate(psi.conj_coeffs());
        S scaled_var = S::variable(psibar_inv.vars(), psibar_inv.trunc(), 0).scaled(fz);
        S f_univar = substitute(psibar_inv, psibar_inv.vars()[0], scaled_var);

        q_ = pullback_tangential(qk, f_univar, gw);
        // the straightened pair coefficient must be exactly 2i chi^n
        {
            S got = pair_coeff(q_, t.alpha, t.mu);
            S want = S::monomial(got.vars(), got.trunc(), MultiIndex::unit(0, static_cast<unsigned>(t.n)),
                                 from_gauss(GaussRat(Rat(2)) * GaussRat::i()));
            if (!residual_acceptable(S::sub(got, want)))
                raise(ErrorCode::SingularStep, "straightening failed to normalize the leading pair");
        }

        // epsilon minimization over the orbit, then the caller's residual element
        if (q_.trunc() < tt.alpha + tt.mu + tt.n)
            raise(ErrorCode::InsufficientTruncation,
                  "straightening consumed too many orders: the second invariant pair fell "
                  "outside the window (supply more input terms or mark the leading "
                  "coefficient complete)");
        K v_cur = pair_coeff(q_, tt.alpha, tt.mu)
                      .coefficient(MultiIndex::unit(0, static_cast<unsigned>(tt.n)));
        if (!certainly_nonzero_scalar(v_cur))
            raise(ErrorCode::InsufficientTruncation,
                  "second leading coefficient not certified nonzero");
        std::vector<EpsCandidate> orbit = eps_orbit(t, tt);
        size_t winner = pick_minimal_eps(v_cur, orbit);
        trace_.push_back("eps orbit winner index " + std::to_string(winner));
        AngleRational rot_angle = orbit[winner].gamma * opt_.residual.gamma;
        int rot_delta = orbit[winner].delta * opt_.residual.delta;

        K gamma_val;
        if constexpr (scalar_traits<K>::exact) {
            auto g = rot_angle.realize();
            if (!g)
                raise(ErrorCode::NonRationalScaling,
                      "selected rotation " + rot_angle.str() + " leaves the Gaussian rationals");
            gamma_val = *g;
        } else {
            gamma_val = unit_from_angle(rot_angle.num, rot_angle.den, prec_);
        }
        q_ = pullback_torus(q_, gamma_val, rot_delta);
        second_leading_ = pair_coeff(q_, tt.alpha, tt.mu)
                              .coefficient(MultiIndex::unit(0, static_cast<unsigned>(tt.n)));
        if (!certainly_nonzero_scalar(second_leading_))
            raise(ErrorCode::InsufficientTruncation, "second leading coefficient not certified nonzero");
        if constexpr (scalar_traits<K>::exact) {
            if (meta_.case_kind == CaseAB::CaseB && second_leading_.norm2() != 4)
                raise(ErrorCode::SingularStep, "case B normalization failed to reach modulus 2");
        }

        // assemble the preliminary map
        S f_map = f_univar.transplant(kMapVars, {0, -1, -1, -1}, false);
        S g_map = S::variable(kMapVars, f_map.trunc(), 1).scaled(gw);
        BasicFormalMap<K> pre = make_map(f_map, g_map);
        BasicFormalMap<K> rot =
            make_map(S::variable(kMapVars, f_map.trunc(), 0).scaled(gamma_val),
                     S::variable(kMapVars, f_map.trunc(), 1).scaled(rot_delta < 0 ? K(-1) : K(1)));
        acc_map_ = compose(pre, rot);
    }

    // drop a factor chi^n from a univariate series with vanishing order >= n;
    // interval coefficients below that order must at least enclose zero
    // (their exact values are known to vanish from the exact profile)
    static S shift_down(const S& u, unsigned n) {
        S r(u.vars(), std::max(u.trunc() - static_cast<int>(n), 0));
        for (const auto& term : u.terms()) {
            if (term.first.total() < n) {
                if (acceptably_zero_scalar(term.second)) continue;
                raise(ErrorCode::SingularStep, "vanishing order dropped below the invariant order");
            }
            r = S::add(r, S::monomial(r.vars(), r.trunc(),
                                      MultiIndex::unit(0, term.first.total() - n), term.second));
        }
        return r;
    }

    // nth root of psi^n-shaped series with psi = chi + ...: input chi*unit
    static S nth_root_shifted(const S& chi_times_unit, unsigned n) {
        // chi_times_unit = chi * unit; psi = chi * unit^(1/n)
        S unit = shift_down(chi_times_unit, 1);
        S root = nth_root(unit, n);
        S chi = S::variable(chi_times_unit.vars(), chi_times_unit.trunc(), 0);
        return S::mul(chi, root.with_trunc(chi_times_unit.trunc()));
    }

    size_t pick_minimal_eps(const K& v, const std::vector<EpsCandidate>& orbit) {
        // base argument a = arg(v / i); candidate args are a + theta mod 2 pi
        if constexpr (scalar_traits<K>::exact) {
            GaussRat vi = v * (-GaussRat::i());
            auto wraps = [&](const AngleRational& th) {
                if (th.num == 0) return false;
                // wraps iff a >= 2 pi - theta
                long num = 2 * th.den - th.num;
                return compare_arg_with_angle(vi, num, th.den) >= 0;
            };
            size_t best = 0;
            bool best_wrap = wraps(orbit[0].rotation);
            for (size_t i = 1; i < orbit.size(); ++i) {
                bool w = wraps(orbit[i].rotation);
                const AngleRational &ti = orbit[i].rotation, &tb = orbit[best].rotation;
                bool better = false;
                if (w != best_wrap)
                    better = w;  // wrapped args are smaller
                else if (ti.num * tb.den < tb.num * ti.den)
                    better = true;
                if (better) {
                    best = i;
                    best_wrap = w;
                }
            }
            return best;
        } else {
            // interval arguments at working precision; candidates are distinct
            // angles, so a failure to separate is reported, not guessed
            mpfr_prec_t prec = prec_;
            RInterval base = ball_arg(v * (-K::i()));
            RInterval two_pi(prec);
            mpfr_const_pi(two_pi.lo_mut(), MPFR_RNDD);
            mpfr_const_pi(two_pi.hi_mut(), MPFR_RNDU);
            mpfr_mul_ui(two_pi.lo_mut(), two_pi.lo(), 2, MPFR_RNDD);
            mpfr_mul_ui(two_pi.hi_mut(), two_pi.hi(), 2, MPFR_RNDU);
            std::vector<RInterval> args;
            for (const auto& c : orbit) {
                RInterval pi_i(prec);
                mpfr_const_pi(pi_i.lo_mut(), MPFR_RNDD);
                mpfr_const_pi(pi_i.hi_mut(), MPFR_RNDU);
                RInterval th = pi_i * RInterval::from_rat(Rat(c.rotation.num, c.rotation.den), prec);
                RInterval a = base + th;
                // wrap once if certainly above 2 pi
                if (!RInterval::certainly_less(a, two_pi)) {
                    if (RInterval::certainly_less(two_pi, a) || a.certainly_positive()) {
                        RInterval b = a - two_pi;
                        if (b.certainly_positive() || b.contains_zero())
                            a = b;
                        else
                            raise(ErrorCode::Inconclusive, "epsilon argument wrap not certified");
                    } else {
                        raise(ErrorCode::Inconclusive, "epsilon argument wrap not certified");
                    }
                }
                args.push_back(a);
            }
            size_t best = 0;
            for (size_t i = 1; i < args.size(); ++i) {
                if (RInterval::certainly_less(args[i], args[best]))
                    best = i;
                else if (!RInterval::certainly_less(args[best], args[i]))
                    raise(ErrorCode::Inconclusive,
                          "epsilon candidates not separated at this precision");
            }
            return best;
        }
    }

    static RInterval ball_arg(const CBall& v) {
        mpfr_prec_t prec = std::max(v.re().prec(), v.im().prec());
        if (!v.certainly_nonzero())
            raise(ErrorCode::Inconclusive, "argument of an interval containing zero");
        RInterval th(prec);
        Mpfr a1(prec), a2(prec), a3(prec), a4(prec);
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
        if (mpfr_cmp(th.lo(), th.hi()) > 0)
            raise(ErrorCode::Inconclusive, "argument enclosure wraps the branch cut");
        return th;
    }

    S to_mode(const MultiSeries& f) const {
        if constexpr (scalar_traits<K>::exact)
            return f;
        else
            return to_ball(f, prec_);
    }

    // ---- the induction -------------------------------------------------
    void steps();
    BasicNormalizationResult<K> assemble();
    std::vector<K> solve_real_system(std::vector<std::vector<K>> cols, std::vector<K> rhs,
                                     size_t ncols, int k);

    QForm input_;
    NormalizeOptions opt_;
    mpfr_prec_t prec_;
    NormalformMeta meta_;
    int D_ = 0;
    S q_;
    BasicFormalMap<K> acc_map_;
    K second_leading_;
    std::vector<StepRecord<K>> records_;
    std::vector<std::string> trace_;
};

// ---------------------------------------------------------------------------
// exact delta-form pullback: the map is id + (dF, dG) with small jets, the
// target is q0, and the unknown presentation is q0 + Delta. The fixed point
//   Delta = sum_{m != 0} (d^m q0 / m!) dFhat^{m1} dA^{m2} dB^{m3} - dGhat
// is evaluated with finite Taylor sums of the polynomial-truncated data, so
// every iterate is exact.
template <class K>
class DeltaPullback {
public:
    DeltaPullback(const Series<K>& q0, int T) : q0_(q0.truncated(T)), T_(T) {
        pow_.push_back(Series<K>::constant(kQVars, T_, K(1)));
        pow_.push_back(q0_);
    }

    const Series<K>& q0_power(unsigned j) {
        while (pow_.size() <= j) pow_.push_back(Series<K>::mul(pow_.back(), q0_));
        return pow_[j];
    }

    // d^m q0 / m! cached by multi-index over (z, zb, tau). Entries are
    // relabeled back to the working order: they are only ever multiplied by
    // increments of valuation >= |m|, which pushes the uncertain tail beyond
    // the truncation.
    const Series<K>& taylor(const std::array<unsigned, 3>& m) {
        auto it = taylor_.find(m);
        if (it != taylor_.end()) return it->second;
        if (m == std::array<unsigned, 3>{0, 0, 0}) return taylor_.emplace(m, q0_).first->second;
        for (int i = 2; i >= 0; --i) {
            if (m[static_cast<size_t>(i)] == 0) continue;
            std::array<unsigned, 3> prev = m;
            prev[static_cast<size_t>(i)]--;
            Series<K> d = taylor(prev).derivative(i).scaled(
                K(static_cast<long>(m[static_cast<size_t>(i)])).inverse());
            return taylor_.emplace(m, d.with_trunc(T_)).first->second;
        }
        raise(ErrorCode::ArithmeticError, "unreachable");
    }

    // substitute w -> q0 + delta into a (z,w) series, exactly
    Series<K> eval_w(const Series<K>& g, const Series<K>& delta) {
        Series<K> out(kQVars, T_);
        if (g.is_zero()) return out;
        unsigned maxw = 0;
        for (const auto& t : g.terms()) maxw = std::max(maxw, t.first[1]);
        // powers of delta, pruned by valuation
        std::vector<Series<K>> dpow{Series<K>::constant(kQVars, T_, K(1))};
        if (!delta.is_zero()) {
            dpow.push_back(delta);
            while (!dpow.back().is_zero()) dpow.push_back(Series<K>::mul(dpow.back(), delta));
        }
        for (unsigned j = 0; j <= maxw; ++j) {
            Series<K> cj = coeff_extract(g, std::vector<std::pair<int, unsigned>>{{1, j}});
            if (cj.is_zero()) continue;
            Series<K> cz = cj.transplant(kQVars, {0, -1, -1, -1}, false).with_trunc(T_);
            // (q0 + delta)^j via the binomial over cached powers
            Series<K> pj(kQVars, T_);
            for (unsigned l = 0; l < dpow.size() && l <= j; ++l) {
                if (l > 0 && dpow[l].is_zero()) break;
                K binom(1);
                for (unsigned i = 0; i < l; ++i)
                    binom = binom * K(static_cast<long>(j - i)) * K(static_cast<long>(i + 1)).inverse();
                Series<K> term = Series<K>::mul(q0_power(j - l), dpow[l]).scaled(binom);
                pj = Series<K>::add(pj, term);
            }
            out = Series<K>::add(out, Series<K>::mul(cz, pj));
        }
        return out;
    }

    // the full Taylor image sum_{m} (d^m q0/m!) a^{m1} b^{m2} c^{m3} - q0,
    // where a is delta-dependent and b, c are fixed
    Series<K> taylor_image(const Series<K>& a, const std::vector<Series<K>>& bpow,
                           const std::vector<Series<K>>& cpow) {
        Series<K> acc(kQVars, T_);
        std::vector<Series<K>> apow{Series<K>::constant(kQVars, T_, K(1))};
        if (!a.is_zero()) {
            apow.push_back(a);
            while (!apow.back().is_zero()) apow.push_back(Series<K>::mul(apow.back(), a));
        }
        for (unsigned m1 = 0; m1 < apow.size(); ++m1) {
            if (m1 > 0 && apow[m1].is_zero()) break;
            for (unsigned m2 = 0; m2 < bpow.size(); ++m2) {
                Series<K> p12 = m2 == 0 ? apow[m1] : Series<K>::mul(apow[m1], bpow[m2]);
                if (m1 + m2 > 0 && p12.is_zero()) break;
                for (unsigned m3 = 0; m3 < cpow.size(); ++m3) {
                    if (m1 == 0 && m2 == 0 && m3 == 0) continue;
                    Series<K> p = m3 == 0 ? p12 : Series<K>::mul(p12, cpow[m3]);
                    if (p.is_zero()) break;
                    acc = Series<K>::add(acc, Series<K>::mul(taylor({m1, m2, m3}), p));
                }
            }
        }
        return acc;
    }

    static std::vector<Series<K>> powers_of(const Series<K>& x, int T) {
        std::vector<Series<K>> p{Series<K>::constant(kQVars, T, K(1))};
        if (!x.is_zero()) {
            p.push_back(x);
            while (!p.back().is_zero()) p.push_back(Series<K>::mul(p.back(), x));
        }
        return p;
    }

    // solve for Delta
    Series<K> solve(const Series<K>& dF, const Series<K>& dG) {
        Series<K> dA = bar_into_q_vars(dF).truncated(T_);
        Series<K> dB = bar_into_q_vars(dG).truncated(T_);
        std::vector<Series<K>> bpow = powers_of(dA, T_), cpow = powers_of(dB, T_);
        Series<K> delta(kQVars, T_);
        int budget = T_ + 2;
        for (int it = 0; it < budget; ++it) {
            Series<K> dFhat = eval_w(dF, delta);
            Series<K> dGhat = eval_w(dG, delta);
            Series<K> next = Series<K>::sub(taylor_image(dFhat, bpow, cpow), dGhat);
            if constexpr (scalar_traits<K>::exact) {
                if (next == delta) return delta;
            }
            delta = std::move(next);
        }
        if constexpr (scalar_traits<K>::exact)
            raise(ErrorCode::NoConvergence, "delta pullback did not stabilize");
        return delta;
    }

private:
    Series<K> q0_;
    int T_;
    std::vector<Series<K>> pow_;
    std::map<std::array<unsigned, 3>, Series<K>> taylor_;
};

// ---------------------------------------------------------------------------
// step induction

template <class K>
void NormalformEngine<K>::steps() {
    const Triple t = meta_.t, tt = meta_.tt;
    const long alpha = t.alpha, n = t.n, mu = t.mu;
    const long alphat = tt.alpha, nt = tt.n, mut = tt.mu;
    const long alphap = meta_.prime_pair.alpha, mup = meta_.prime_pair.mu, np = meta_.n_prime;

    const int Tq = q_.trunc();
    int k_max = 0;
    k_max = std::max<long>(k_max, Tq - (alpha + mu + n));
    k_max = std::max<long>(k_max, Tq - ((alphap - 1) + mup + np));
    k_max = std::max<long>(k_max, Tq - (alphat + mut + nt));

    K two_i = from_gauss(GaussRat(Rat(2)) * GaussRat::i());
    K i_k = from_gauss(GaussRat::i());

    // one probe slot: a complex F coefficient of z^a w^k, or the real s_{k+1}
    struct Slot {
        int kind;    // 0: F coefficient (complex), 1: s_{k+1} (real)
        unsigned a;  // z-exponent for kind 0
    };
    struct Target {
        int kind;  // 0: complex coefficient (two rows), 1: the eps-reality row
        long za, taum;
        unsigned zbexp;
    };

    // Solve one affine subsystem at order k against the current q_, apply the
    // solved map exactly and verify that the targets died. The remainder
    // terms of the order-k identities depend polynomially on already-frozen
    // jets, so splitting the order into sequential affine stages (first the
    // pure w^k jet, then the tangential jets with the transversal parameter)
    // matches the construction; each stage rebases on the previous result.
    auto run_stage = [&](int k, const std::vector<Slot>& slots,
                         const std::vector<Target>& targets, const K& s_fixed) -> std::pair<S, K> {
        DeltaPullback<K> dp(q_, Tq);
        std::vector<RCoefficient<K>> rcs = r_expansion(q_);

        std::vector<std::pair<size_t, K>> coords;
        for (size_t si = 0; si < slots.size(); ++si) {
            coords.push_back({si, K(1)});
            if (slots[si].kind == 0) coords.push_back({si, i_k});
        }

        auto read_targets = [&](const S& series) {
            std::vector<K> rows;
            for (const auto& tg : targets) {
                std::array<unsigned, 4> e{static_cast<unsigned>(tg.za), tg.zbexp,
                                          static_cast<unsigned>(tg.taum), 0};
                K v = series.coefficient(MultiIndex(e));
                if (tg.kind == 0) {
                    rows.push_back(re_of(v));
                    rows.push_back(re_of(v * (-i_k)));  // imaginary part
                } else {
                    rows.push_back(re_of(v * second_leading_.conj()));
                }
            }
            return rows;
        };

        auto probe_map = [&](const S& dF, const K& svalue) {
            std::vector<K> reals(static_cast<size_t>(Tq) + 2, K(0));
            reals[1] = K(1);  // the stage map is tangent to the identity
            reals[static_cast<size_t>(k) + 1] = svalue;
            S f_full = S::add(S::variable(kMapVars, Tq, 0), dF);
            S g_full = build_transversal(f_full, rcs, Tq, reals);
            S dG = S::sub(g_full, S::variable(kMapVars, Tq, 1));
            return dG;
        };
        auto slot_monomial = [&](const Slot& sl, const K& value) {
            if (sl.kind == 1) return S(kMapVars, Tq);
            std::array<unsigned, 4> e{sl.a, static_cast<unsigned>(k), 0, 0};
            return S::monomial(kMapVars, Tq, MultiIndex(e), value);
        };
        auto linear_delta = [&](const S& dF, const S& dG) {
            S dFhat = dp.eval_w(dF, S(kQVars, Tq));
            S dGhat = dp.eval_w(dG, S(kQVars, Tq));
            S dA = bar_into_q_vars(dF).truncated(Tq);
            S dB = bar_into_q_vars(dG).truncated(Tq);
            S out = S::mul(dp.taylor({1, 0, 0}), dFhat);
            out = S::add(out, S::mul(dp.taylor({0, 1, 0}), dA));
            out = S::add(out, S::mul(dp.taylor({0, 0, 1}), dB));
            return S::sub(out, dGhat);
        };

        S zero_f(kMapVars, Tq);
        std::vector<K> base_rows =
            read_targets(S::add(q_, linear_delta(zero_f, probe_map(zero_f, s_fixed))));
        size_t nrows = base_rows.size();

        std::vector<std::vector<K>> cols;
        for (const auto& [si, val] : coords) {
            K sval = slots[si].kind == 1 ? val : K(0);
            S dF = slot_monomial(slots[si], val);
            std::vector<K> rows =
                read_targets(S::add(q_, linear_delta(dF, probe_map(dF, s_fixed + sval))));
            for (size_t r = 0; r < nrows; ++r) rows[r] = rows[r] - base_rows[r];
            cols.push_back(std::move(rows));
        }

        std::vector<K> rhs(nrows);
        for (size_t r = 0; r < nrows; ++r) rhs[r] = -base_rows[r];
        std::vector<K> sol = solve_real_system(cols, rhs, coords.size(), k);

        K s_solved = s_fixed;
        S dF_stage(kMapVars, Tq);
        for (size_t j = 0; j < coords.size(); ++j) {
            auto [si, val] = coords[j];
            if (slots[si].kind == 1)
                s_solved = s_solved + sol[j];
            else
                dF_stage = S::add(dF_stage, slot_monomial(slots[si], sol[j] * val));
        }

        std::vector<K> reals(static_cast<size_t>(Tq) + 2, K(0));
        reals[1] = K(1);
        reals[static_cast<size_t>(k) + 1] = s_solved;
        S f_stage = S::add(S::variable(kMapVars, Tq, 0), dF_stage);
        S g_stage = build_transversal(f_stage, rcs, Tq, reals);
        S dG_stage = S::sub(g_stage, S::variable(kMapVars, Tq, 1));

        S q_next = S::add(q_, dp.solve(dF_stage, dG_stage));

        std::vector<K> verify = read_targets(q_next);
        for (const K& v : verify)
            if (!acceptably_zero_scalar(v))
                raise(ErrorCode::SingularStep,
                      "affine stage model mismatch at step " + std::to_string(k));
        {
            S got = pair_coeff(q_next, alpha, mu);
            S want = S::monomial(got.vars(), got.trunc(),
                                 MultiIndex::unit(0, static_cast<unsigned>(n)), two_i);
            if (!residual_acceptable(S::sub(got, want)))
                raise(ErrorCode::SingularStep, "stage disturbed the straightened pair");
        }

        acc_map_ = compose(acc_map_, make_map(f_stage, g_stage));
        q_ = std::move(q_next);
        return {dF_stage, s_solved};
    };

    for (int k = 1; k <= k_max; ++k) {
        bool is_lambda = meta_.lambda && *meta_.lambda == k;
        Rat dk = pivot_determinant(t, tt, k);
        if ((dk == 0) != is_lambda)
            raise(ErrorCode::SingularStep, "pivot determinant pattern contradicts the case analysis");

        bool has_T1 = (alphap - 1) + (mup + k) + np <= Tq;
        bool has_T3 = alpha + (mu + k) + n <= Tq;
        bool has_T4 = alphat + (mut + k) + nt <= Tq;
        long m_cap = Tq - alpha - (mu + k);  // largest readable zb-degree of q_{alpha,mu+k}
        long a_max = std::min<long>(m_cap - n + 1, static_cast<long>(Tq));
        std::vector<unsigned> high_as;
        for (long a = 2; a <= a_max; ++a) high_as.push_back(static_cast<unsigned>(a));
        if (!has_T1 && !has_T3 && !has_T4 && high_as.empty()) continue;

        StepRecord<K> rec;
        rec.k = k;
        rec.pivot_determinant = dk;
        rec.degenerate = is_lambda;

        // stage one: the pure w^k jet of F against the cross condition; the
        // later targets depend on it beyond first order, so it is frozen into
        // the presentation before anything else is probed
        if (has_T1) {
            auto [df, s0] = run_stage(
                k, {Slot{0, 0}},
                {Target{0, alphap - 1, mup + k, static_cast<unsigned>(np)}}, K(0));
            (void)s0;
            std::array<unsigned, 4> e0{0, static_cast<unsigned>(k), 0, 0};
            rec.f_w = df.coefficient(MultiIndex(e0));
        }

        // stage two: tangential jets and the transversal parameter, jointly
        // affine once the w^k jet is frozen
        std::vector<Slot> slots;
        std::vector<Target> targets;
        if (has_T3) slots.push_back({0, 1});
        for (unsigned a : high_as) slots.push_back({0, a});
        for (unsigned a : high_as)
            targets.push_back({0, alpha, mu + k, static_cast<unsigned>(n - 1 + a)});
        if (has_T3) targets.push_back({0, alpha, mu + k, static_cast<unsigned>(n)});
        if (has_T4 && !is_lambda) {
            slots.push_back({1, 0});
            targets.push_back({1, alphat, mut + k, static_cast<unsigned>(nt)});
        }
        K s_fixed = K(0);
        if (is_lambda && opt_.free_param) s_fixed = from_rat(*opt_.free_param);
        if (!slots.empty() || !targets.empty()) {
            auto [df, s_solved] = run_stage(k, slots, targets, s_fixed);
            rec.s_next = s_solved;
            std::array<unsigned, 4> e1{1, static_cast<unsigned>(k), 0, 0};
            rec.f_zw = df.coefficient(MultiIndex(e1));
            for (unsigned a : high_as) {
                std::array<unsigned, 4> ea{a, static_cast<unsigned>(k), 0, 0};
                rec.f_high.push_back({a, df.coefficient(MultiIndex(ea))});
            }
        } else {
            rec.s_next = s_fixed;
        }

        // the cross condition killed in stage one must survive stage two
        if (has_T1) {
            std::array<unsigned, 4> e{static_cast<unsigned>(alphap - 1), static_cast<unsigned>(np),
                                      static_cast<unsigned>(mup + k), 0};
            if (!acceptably_zero_scalar(q_.coefficient(MultiIndex(e))))
                raise(ErrorCode::SingularStep,
                      "tangential stage disturbed the cross condition at step " + std::to_string(k));
        }

        records_.push_back(std::move(rec));
    }
}

template <class K>
std::vector<K> NormalformEngine<K>::solve_real_system(std::vector<std::vector<K>> cols,
                                                      std::vector<K> rhs, size_t ncols, int k) {
    size_t nrows = rhs.size();
#ifdef CRNF_DEBUG_SOLVE
    if constexpr (scalar_traits<K>::exact) {
        fprintf(stderr, "step %d system %zux%zu\n", k, nrows, ncols);
        for (size_t r = 0; r < nrows; ++r) {
            for (size_t j = 0; j < ncols; ++j)
                fprintf(stderr, "%8s ", to_string(cols[j][r]).c_str());
            fprintf(stderr, "| %s\n", to_string(rhs[r]).c_str());
        }
    }
#endif
    if (ncols != nrows)
        raise(ErrorCode::SingularStep,
              "unbalanced normalization system at step " + std::to_string(k) + ": " +
                  std::to_string(nrows) + " conditions for " + std::to_string(ncols) + " unknowns");
    // Gaussian elimination, columns indexed by unknowns
    std::vector<size_t> perm(ncols);
    for (size_t j = 0; j < ncols; ++j) perm[j] = j;
    std::vector<K> sol(ncols, K(0));
    std::vector<std::vector<K>> a(nrows, std::vector<K>(ncols));
    for (size_t r = 0; r < nrows; ++r)
        for (size_t j = 0; j < ncols; ++j) a[r][j] = cols[j][r];
    std::vector<K> b = rhs;
    std::vector<size_t> where(ncols, static_cast<size_t>(-1));
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < nrows; ++col) {
        size_t piv = nrows;
        for (size_t r = row; r < nrows; ++r)
            if (certainly_nonzero_scalar(a[r][col])) {
                piv = r;
                break;
            }
        if (piv == nrows) {
            // all entries zero or uncertain
            for (size_t r = row; r < nrows; ++r)
                if (!acceptably_zero_scalar(a[r][col]))
                    raise(ErrorCode::Inconclusive,
                          "pivot not certified at step " + std::to_string(k));
            continue;
        }
        std::swap(a[piv], a[row]);
        std::swap(b[piv], b[row]);
        K inv = a[row][col].inverse();
        for (size_t j = col; j < ncols; ++j) a[row][j] = a[row][j] * inv;
        b[row] = b[row] * inv;
        for (size_t r = 0; r < nrows; ++r) {
            if (r == row) continue;
            K f = a[r][col];
            if (acceptably_zero_scalar(f) && !certainly_nonzero_scalar(f)) {
                if constexpr (scalar_traits<K>::exact) continue;
            }
            for (size_t j = col; j < ncols; ++j) a[r][j] = a[r][j] - f * a[row][j];
            b[r] = b[r] - f * b[row];
        }
        where[col] = row;
        ++row;
    }
    for (size_t col = 0; col < ncols; ++col) {
        if (where[col] == static_cast<size_t>(-1))
            raise(ErrorCode::SingularStep,
                  "normalization system is singular at step " + std::to_string(k));
        sol[col] = b[where[col]];
    }
    return sol;
}

template <class K>
BasicNormalizationResult<K> NormalformEngine<K>::assemble() {
    BasicNormalizationResult<K> res;
    res.q_nf = validate_q(q_);
    res.map = acc_map_;
    res.t = meta_.t;
    res.tt = meta_.tt;
    res.prime_pair = meta_.prime_pair;
    res.n_prime = meta_.n_prime;
    res.case_kind = meta_.case_kind;
    res.second_leading = second_leading_;
    if constexpr (scalar_traits<K>::exact) res.c_squared = second_leading_.norm2();
    res.lambda = meta_.lambda;
    res.exceptional_set = meta_.exceptional_set;
    res.free_param = opt_.free_param;
    res.steps = std::move(records_);
    res.trace = std::move(trace_);
    res.ball_mode = !scalar_traits<K>::exact;
    res.precision = prec_;
    // the second leading coefficient must have survived the induction
    K now = pair_coeff(res.q_nf.q, meta_.tt.alpha, meta_.tt.mu)
                .coefficient(MultiIndex::unit(0, static_cast<unsigned>(meta_.tt.n)));
    if (!acceptably_zero_scalar(now - second_leading_))
        raise(ErrorCode::SingularStep, "induction disturbed the second leading coefficient");
    return res;
}

inline NormalizationResult normalize(const QForm& m, int degree, const NormalizeOptions& opt = {}) {
    return NormalformEngine<GaussRat>(m, degree, opt, 0).run();
}

// only the preliminary stage: straightening of the two leading coefficients
inline NormalizationResult prelim_normalize(const QForm& m, int degree,
                                            const NormalizeOptions& opt = {}) {
    return NormalformEngine<GaussRat>(m, degree, opt, 0).run_preliminary();
}

inline BasicNormalizationResult<CBall> normalize_ball(const QForm& m, int degree,
                                                      const NormalizeOptions& opt,
                                                      mpfr_prec_t precision) {
    return NormalformEngine<CBall>(m, degree, opt, precision).run();
}

// ---------------------------------------------------------------------------
// normal-form conditions, checkable on any presentation

struct NormalFormCheck {
    bool applicable = false;
    bool ok = false;
    std::string violation;  // names the first violated condition
};

template <class K>
NormalFormCheck is_normal_form(const BasicQForm<K>& m, const Triple& t, const Triple& tt) {
    NormalFormCheck out;
    if (t == tt || t.alpha == t.n) {
        out.violation = "needs two distinct triples with alpha != n in the first";
        return out;
    }
    out.applicable = true;
    const Series<K>& q = m.q;
    int Tq = q.trunc();
    auto coeff = [&](long a, long mu) {
        return coeff_extract(q, std::vector<std::pair<int, unsigned>>{
                                    {0, static_cast<unsigned>(a)}, {2, static_cast<unsigned>(mu)}});
    };
    K two_i = [&] {
        if constexpr (scalar_traits<K>::exact)
            return GaussRat(Rat(2)) * GaussRat::i();
        else
            return CBall::from_gauss(GaussRat(Rat(2)) * GaussRat::i(), 64);
    }();

    // leading pair pinned to 2i chi^n
    {
        Series<K> got = coeff(t.alpha, t.mu);
        Series<K> want = Series<K>::monomial(got.vars(), got.trunc(),
                                             MultiIndex::unit(0, static_cast<unsigned>(t.n)), two_i);
        if (!residual_acceptable(Series<K>::sub(got, want))) {
            out.violation = "leading coefficient condition: q at the first pair is not 2i chi^n";
            return out;
        }
    }
    // second pair: i c eps chi^n~ + higher, with minimal-argument eps
    K v = coeff(tt.alpha, tt.mu).coefficient(MultiIndex::unit(0, static_cast<unsigned>(tt.n)));
    {
        Series<K> sec = coeff(tt.alpha, tt.mu);
        for (const auto& term : sec.terms())
            if (term.first.total() < static_cast<unsigned>(tt.n) &&
                !acceptably_zero_scalar(term.second)) {
                out.violation = "second leading condition: vanishing order above n~ broken";
                return out;
            }
        if (!certainly_nonzero_scalar(v)) {
            out.violation = "second leading condition: chi^n~ coefficient not certified nonzero";
            return out;
        }
        if (case_AB(t, tt) == CaseAB::CaseB) {
            if constexpr (scalar_traits<K>::exact) {
                if (v.norm2() != 4) {
                    out.violation = "second leading condition: modulus is not 2 in case B";
                    return out;
                }
            }
        }
        if constexpr (scalar_traits<K>::exact) {
            GaussRat vi = v * (-GaussRat::i());
            for (const auto& cand : eps_orbit(t, tt)) {
                if (cand.rotation.num == 0) continue;
                long num = 2 * cand.rotation.den - cand.rotation.num;
                if (compare_arg_with_angle(vi, num, cand.rotation.den) >= 0) {
                    out.violation = "second leading condition: argument of eps is not minimal";
                    return out;
                }
            }
        }
    }
    // degree cap on q_{alpha, mu+k}
    for (const auto& term : q.terms()) {
        if (term.first[0] != static_cast<unsigned>(t.alpha)) continue;
        long kk = static_cast<long>(term.first[2]) - t.mu;
        if (kk < 1) continue;
        if (term.first[1] >= static_cast<unsigned>(t.n) && !acceptably_zero_scalar(term.second)) {
            out.violation = "degree cap condition: q at (alpha, mu+k) exceeds degree n-1 at k=" +
                            std::to_string(kk);
            return out;
        }
    }
    // cross condition at the pair with alpha' > 1
    InvariantPair prime = tt.alpha > 1 ? InvariantPair{tt.alpha, tt.mu} : InvariantPair{t.alpha, t.mu};
    long np = tt.alpha > 1 ? tt.n : t.n;
    for (int k = 1; (prime.alpha - 1) + (prime.mu + k) + np <= Tq; ++k) {
        std::array<unsigned, 4> e{static_cast<unsigned>(prime.alpha - 1),
                                  static_cast<unsigned>(np), static_cast<unsigned>(prime.mu + k), 0};
        if (!acceptably_zero_scalar(q.coefficient(MultiIndex(e)))) {
            out.violation = "cross condition: chi^n' of q at (alpha'-1, mu'+k) survives at k=" +
                            std::to_string(k);
            return out;
        }
    }
    // reality condition at the second pair away from the degenerate index
    std::optional<long> lambda;
    {
        long S = t.alpha + t.n, St = tt.alpha + tt.n;
        if (S != St) {
            Rat lam = rat_from_parts(St * t.mu - S * tt.mu, St - S) - 1;
            if (lam.get_den() == 1 && lam.get_num() >= 1)
                lambda = static_cast<long>(lam.get_num().get_si());
        }
    }
    K half = K(2).inverse();
    for (int k = 1; tt.alpha + (tt.mu + k) + tt.n <= Tq; ++k) {
        if (lambda && *lambda == k) continue;
        std::array<unsigned, 4> e{static_cast<unsigned>(tt.alpha), static_cast<unsigned>(tt.n),
                                  static_cast<unsigned>(tt.mu + k), 0};
        K u = q.coefficient(MultiIndex(e)) * v.conj();
        K re = (u + u.conj()) * half;
        if (!acceptably_zero_scalar(re)) {
            out.violation = "reality condition: eps-phase of q at (alpha~, mu~+k) survives at k=" +
                            std::to_string(k);
            return out;
        }
    }
    out.ok = true;
    return out;
}

// ---------------------------------------------------------------------------
// formal equivalence by normal-form comparison

struct EquivalenceResult {
    enum class Kind { Equivalent, Distinct, Inconclusive } kind = Kind::Inconclusive;
    std::string reason;
    std::optional<TorusElement> residual;   // the group element matching the forms
    std::optional<Rat> free_used;           // solved free parameter on the second side
    std::optional<FormalMap> witness_map;   // assembled when the rotation is representable
};

namespace detail {

// q == pullback of qp under (gamma z, delta w), decided symbolically: the
// multiplier of slot (a, m, mu) is gamma^(a-m) delta^(mu-1), an exact angle.
inline bool torus_match(const MultiSeries& q, const MultiSeries& qp, const TorusElement& g) {
    int T = std::min(q.trunc(), qp.trunc());
    MultiSeries qt = q.truncated(T), qpt = qp.truncated(T);
    std::map<MultiIndex, std::pair<GaussRat, GaussRat>> slots;
    for (const auto& t : qt.terms()) slots[t.first].first = t.second;
    for (const auto& t : qpt.terms()) slots[t.first].second = t.second;
    for (const auto& [mi, pr] : slots) {
        const GaussRat& u = pr.first;
        const GaussRat& up = pr.second;
        AngleRational omega = g.gamma.power(static_cast<long>(mi[0]) - static_cast<long>(mi[1]));
        if (g.delta < 0 && ((static_cast<long>(mi[2]) - 1) % 2 != 0))
            omega = omega * AngleRational::make(1, 1);
        if (up.is_zero()) {
            if (!u.is_zero()) return false;
            continue;
        }
        auto w = omega.realize();
        if (!w) {
            // u = up * e^{i omega} with a non-representable rotation forces u = 0
            if (!u.is_zero()) return false;
            return false;  // up != 0 cannot be matched
        }
        if (u != up * *w) return false;
    }
    return true;
}

inline std::optional<FormalMap> equivalence_witness(const NormalizationResult& ra,
                                                    const NormalizationResult& rb,
                                                    const TorusElement& g) {
    auto gv = g.gamma.realize();
    if (!gv) return std::nullopt;
    int T = std::min(ra.map.trunc(), rb.map.trunc());
    FormalMap rot = make_map(MultiSeries::variable(kMapVars, T, 0).scaled(*gv),
                             MultiSeries::variable(kMapVars, T, 1).scaled(GaussRat(g.delta)));
    // M --inv(map_a)--> NF_a --rot--> NF_b --map_b--> M'
    return compose(rb.map, compose(rot, invert_map(ra.map)));
}

}  // namespace detail

inline EquivalenceResult equivalence(const QForm& a, const QForm& b, int degree,
                                     bool leading_coefficient_complete = false) {
    EquivalenceResult out;
    InvariantProfile pa = profile(a), pb = profile(b);
    if (pa.lambda != pb.lambda) {
        out.kind = EquivalenceResult::Kind::Distinct;
        out.reason = "invariant sets differ";
        return out;
    }
    NormalizeOptions opts;
    opts.leading_coefficient_complete = leading_coefficient_complete;
    NormalizationResult ra = normalize(a, degree, opts);
    if (ra.case_kind == CaseAB::CaseA) {
        NormalizationResult rb = normalize(b, degree, opts);
        if (*ra.c_squared != *rb.c_squared) {
            out.kind = EquivalenceResult::Kind::Distinct;
            out.reason = "the continuous modulus invariant differs";
            return out;
        }
        // compare over the discrete part of the stabilizer with both moduli
        // pinned by the |Gw(0)| = 1 convention
        TorusSubgroup res = group_N({ra.t, ra.tt});
        for (const auto& g : res.finite)
            if (detail::torus_match(ra.q_nf.q, rb.q_nf.q, g)) {
                out.kind = EquivalenceResult::Kind::Equivalent;
                out.residual = g;
                out.witness_map = detail::equivalence_witness(ra, rb, g);
                return out;
            }
        out.kind = EquivalenceResult::Kind::Inconclusive;
        out.reason = "equal modulus invariant; continuous residual family not searched";
        return out;
    }
    TorusSubgroup res = group_N({ra.t, ra.tt});
    if (ra.exceptional_set.empty()) {
        NormalizationResult rb = normalize(b, degree, opts);
        for (const auto& g : res.finite)
            if (detail::torus_match(ra.q_nf.q, rb.q_nf.q, g)) {
                out.kind = EquivalenceResult::Kind::Equivalent;
                out.residual = g;
                out.witness_map = detail::equivalence_witness(ra, rb, g);
                return out;
            }
        out.kind = EquivalenceResult::Kind::Distinct;
        out.reason = "no residual rotation matches the normal forms";
        return out;
    }
    // one free parameter on the second side: probe its affine entry, solve,
    // verify by a full renormalization
    NormalizeOptions o0 = opts, o1 = opts;
    o0.free_param = Rat(0);
    o1.free_param = Rat(1);
    NormalizationResult rb0 = normalize(b, degree, o0);
    NormalizationResult rb1 = normalize(b, degree, o1);
    int T = std::min(ra.q_nf.trunc(), std::min(rb0.q_nf.trunc(), rb1.q_nf.trunc()));
    for (const auto& g : res.finite) {
        std::optional<Rat> solved;
        bool conclusive = true;
        MultiSeries diff = MultiSeries::sub(rb0.q_nf.q.truncated(T), rb1.q_nf.q.truncated(T));
        if (diff.is_zero()) {
            solved = Rat(0);  // the parameter never shows; direct comparison
        } else {
            const MultiIndex mi = diff.terms().front().first;
            // target value for this slot comes from the rotated first side
            AngleRational omega =
                g.gamma.power(static_cast<long>(mi[0]) - static_cast<long>(mi[1]));
            if (g.delta < 0 && ((static_cast<long>(mi[2]) - 1) % 2 != 0))
                omega = omega * AngleRational::make(1, 1);
            auto w = omega.realize();
            GaussRat target;
            bool have_target = false;
            GaussRat ua = ra.q_nf.q.coefficient(mi);
            if (w) {
                // need u_a = w * u_b(t): u_b(t) = u_a / w
                target = ua * w->inverse();
                have_target = true;
            } else if (ua.is_zero()) {
                target = GaussRat(0);
                have_target = true;
            }
            if (!have_target) {
                conclusive = true;  // u_a != 0 with unrepresentable rotation: no match
                continue;
            }
            GaussRat c0 = rb0.q_nf.q.coefficient(mi), c1 = rb1.q_nf.q.coefficient(mi);
            GaussRat slope = c1 - c0;
            if (slope.is_zero()) {
                conclusive = false;  // the first differing slot is not affine in t
            } else {
                GaussRat tt = (target - c0) * slope.inverse();
                if (tt.is_real())
                    solved = tt.re;
                else
                    continue;  // no real parameter can reach the target
            }
        }
        if (!conclusive) {
            out.kind = EquivalenceResult::Kind::Inconclusive;
            out.reason = "free parameter enters the first differing slot nonlinearly";
            return out;
        }
        if (!solved) continue;
        NormalizeOptions ov = opts;
        ov.free_param = *solved;
        NormalizationResult rbv = normalize(b, degree, ov);
        if (detail::torus_match(ra.q_nf.q, rbv.q_nf.q, g)) {
            out.kind = EquivalenceResult::Kind::Equivalent;
            out.residual = g;
            out.free_used = *solved;
            out.witness_map = detail::equivalence_witness(ra, rbv, g);
            return out;
        }
    }
    out.kind = EquivalenceResult::Kind::Distinct;
    out.reason = "no residual rotation and free parameter match the normal forms";
    return out;
}

}  // namespace crnf
