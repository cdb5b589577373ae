#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "crnf/hypersurface.hpp"
#include "crnf/series.hpp"
#include "crnf/symmetry.hpp"
#include "crnf/unimodular.hpp"

namespace crnf {

struct InvariantPair {
    long alpha = 1;
    long mu = 0;

    friend bool operator==(const InvariantPair& a, const InvariantPair& b) {
        return a.alpha == b.alpha && a.mu == b.mu;
    }
    friend bool operator<(const InvariantPair& a, const InvariantPair& b) {
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        return a.mu < b.mu;
    }
    std::string str() const {
        return "(" + std::to_string(alpha) + "," + std::to_string(mu) + ")";
    }
};

// partial order: (a,m) before (b,n) iff a+m <= b+n and m <= n
inline bool precedes_eq(const InvariantPair& a, const InvariantPair& b) {
    return a.alpha + a.mu <= b.alpha + b.mu && a.mu <= b.mu;
}
inline bool precedes_strict(const InvariantPair& a, const InvariantPair& b) {
    return precedes_eq(a, b) && !(a == b);
}

struct TensorEntry {
    Triple triple;
    GaussRat value;  // coefficient of chi^n in q_{alpha,mu}
};

struct InvariantProfile {
    std::vector<InvariantPair> qm;          // confirmed invariant pairs, sorted
    std::vector<Triple> lambda;             // (alpha, n(alpha,mu), mu), same order
    std::vector<TensorEntry> tensors;
    std::optional<long> gamma0;             // empty: no finite-type witness up to D
    std::optional<long> m0;                 // empty: no support at all (Levi flat to D)
    std::vector<InvariantPair> provisional; // minimal pairs whose dominance window is short
    int trunc_certificate = 0;
    bool absolute = false;  // verdicts absolute (input was a full polynomial)
};

namespace detail {

// support pairs with a window-derived identity: which coefficient slots exist
template <class Form>
struct SupportScan {
    std::vector<InvariantPair> support;
};

inline std::vector<InvariantPair> scan_support(const MultiSeries& f, int /*D*/) {
    std::vector<InvariantPair> out;
    for (const auto& t : f.terms()) {
        if (t.first[0] == 0) continue;  // the leading tau term of a q form
        InvariantPair p{static_cast<long>(t.first[0]), static_cast<long>(t.first[2])};
        if (!std::count(out.begin(), out.end(), p)) out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// q_{alpha,mu} (or phi_{alpha,mu}) as a univariate series in zb
inline MultiSeries pair_coefficient(const MultiSeries& f, const InvariantPair& p) {
    return coeff_extract(f, std::vector<std::pair<int, unsigned>>{
                                {0, static_cast<unsigned>(p.alpha)},
                                {2, static_cast<unsigned>(p.mu)}});
}

inline std::vector<InvariantPair> support_pairs(const PhiForm& m) {
    return detail::scan_support(m.phi, m.trunc());
}
inline std::vector<InvariantPair> support_pairs(const QForm& m) {
    return detail::scan_support(m.q, m.trunc());
}

// minimal elements of the support in the partial order; the pairwise scan is
// itself the brute-force definition
inline std::vector<InvariantPair> minimal_pairs(const std::vector<InvariantPair>& support) {
    std::vector<InvariantPair> out;
    for (const auto& p : support) {
        bool dominated = false;
        for (const auto& q : support)
            if (precedes_strict(q, p)) dominated = true;
        if (!dominated) out.push_back(p);
    }
    return out;
}

inline std::vector<InvariantPair> invariant_pairs(const PhiForm& m) {
    return minimal_pairs(support_pairs(m));
}
inline std::vector<InvariantPair> invariant_pairs(const QForm& m) {
    return minimal_pairs(support_pairs(m));
}

namespace detail {

inline InvariantProfile profile_of(const MultiSeries& f, bool from_q, bool absolute) {
    InvariantProfile prof;
    prof.trunc_certificate = f.trunc();
    prof.absolute = absolute;
    std::vector<InvariantPair> support = scan_support(f, f.trunc());
    std::vector<InvariantPair> minimal = minimal_pairs(support);

    for (const auto& p : support) {
        long total = p.alpha + p.mu;
        if (!prof.m0 || total < *prof.m0) prof.m0 = total;
        if (p.mu == 0 && (!prof.gamma0 || p.alpha < *prof.gamma0)) prof.gamma0 = p.alpha;
    }

    GaussRat two_i = GaussRat(2) * GaussRat::i();
    for (const auto& p : minimal) {
        MultiSeries coeff = pair_coefficient(f, p);
        auto n = vanishing_order(coeff);
        if (!n) raise(ErrorCode::TruncationTooSmall,
                      "support pair " + p.str() + " lost its leading coefficient");
        // A preceding slot (beta,nu) is entirely invisible at this truncation
        // when even its lowest admissible coefficient chi^beta lies beyond D,
        // i.e. 2*beta + nu > D; the worst slot under (alpha,mu) is
        // (alpha+mu, 0), so minimality is unconfirmed iff 2(alpha+mu) > D.
        if (!absolute && p.mu >= 1 && 2 * (p.alpha + p.mu) > static_cast<long>(f.trunc())) {
            prof.provisional.push_back(p);
            continue;
        }
        prof.qm.push_back(p);
        Triple tr{p.alpha, static_cast<long>(*n), p.mu};
        prof.lambda.push_back(tr);
        GaussRat lead = coeff.coefficient(MultiIndex::unit(0, *n));
        prof.tensors.push_back({tr, from_q ? lead : two_i * lead});
    }
    return prof;
}

}  // namespace detail

inline InvariantProfile profile(const QForm& m, bool absolute = false) {
    return detail::profile_of(m.q, true, absolute);
}
inline InvariantProfile profile(const PhiForm& m, bool absolute = false) {
    return detail::profile_of(m.phi, false, absolute);
}

inline std::vector<Triple> lambda_set(const QForm& m) { return profile(m).lambda; }
inline std::vector<Triple> lambda_set(const PhiForm& m) { return profile(m).lambda; }

template <class Form>
GaussRat tensor_coeff(const Form& m, const Triple& t) {
    InvariantProfile prof = profile(m);
    for (const auto& e : prof.tensors)
        if (e.triple == t) return e.value;
    raise(ErrorCode::TruncationTooSmall,
          "triple " + t.str() + " is not a confirmed element of the invariant set");
}

// finite type order: least gamma with q_{gamma,0} not identically zero (to D)
template <class Form>
std::optional<long> finite_type_order(const Form& m) {
    return profile(m).gamma0;
}
template <class Form>
std::optional<long> contact_order_m0(const Form& m) {
    return profile(m).m0;
}

struct TransformCheck {
    bool map_holds = false;
    bool lambda_equal = false;
    bool coefficient_law_holds = false;  // whole-series law per invariant pair
    bool tensor_law_holds = false;       // leading-coefficient law
    std::string detail;
    bool ok() const { return map_holds && lambda_equal && coefficient_law_holds && tensor_law_holds; }
};

// Verify the transport of invariant-pair coefficients under H: M -> M':
//   q_{a,m}(chi) = q'_{a,m}(Fbar(chi,0)) Fz(0)^a conj(Gw(0))^(m-1),
// with the corrected rule at (1,0), and the leading-coefficient law
//   [chi^n]q_{a,m} * conj(Gw) = [chi^n]q'_{a,m} * Fz^a conj(Fz)^n conj(Gw)^m.
inline TransformCheck check_transform(const QForm& m, const QForm& mp, const FormalMap& h) {
    TransformCheck out;
    out.map_holds = check_map(m, mp, h).holds;
    if (!out.map_holds) {
        out.detail = "map identity fails";
        return out;
    }
    InvariantProfile pm = profile(m);
    InvariantProfile pmp = profile(mp);
    out.lambda_equal = pm.lambda == pmp.lambda;
    if (!out.lambda_equal) {
        out.detail = "invariant sets differ";
        return out;
    }
    GaussRat fz = h.fz0(), fw = h.fw0(), gwb = h.gw0().conj();
    // Fbar(chi, 0) as a univariate series in zb
    MultiSeries fbar_chi =
        coeff_extract(h.F, std::vector<std::pair<int, unsigned>>{{1, 0}})
            .transplant({"zb"}, {0, -1, -1, -1}, true);

    out.coefficient_law_holds = true;
    out.tensor_law_holds = true;
    for (size_t i = 0; i < pm.qm.size(); ++i) {
        const InvariantPair& p = pm.qm[i];
        const Triple& tr = pm.lambda[i];
        MultiSeries lhs = pair_coefficient(m.q, p);
        MultiSeries rhs_coeff = pair_coefficient(mp.q, p);
        int t = std::min(lhs.trunc(), std::min(rhs_coeff.trunc(), fbar_chi.trunc()));
        MultiSeries composed = substitute(rhs_coeff.truncated(t), "zb", fbar_chi.truncated(t));
        MultiSeries rhs;
        if (p.alpha == 1 && p.mu == 0) {
            MultiSeries inner = MultiSeries::constant({"zb"}, t, fz) + lhs.truncated(t).scaled(fw);
            rhs = (composed * inner).scaled(gwb.inverse());
        } else {
            GaussRat factor = gauss_pow(fz, p.alpha) * gauss_pow(gwb, p.mu - 1);
            rhs = composed.scaled(factor);
        }
        if (!(lhs.truncated(t) == rhs.truncated(t))) {
            out.coefficient_law_holds = false;
            out.detail = "coefficient law fails at pair " + p.str();
        }
        // leading-coefficient law
        GaussRat ln = lhs.coefficient(MultiIndex::unit(0, static_cast<unsigned>(tr.n)));
        GaussRat lnp = rhs_coeff.coefficient(MultiIndex::unit(0, static_cast<unsigned>(tr.n)));
        GaussRat left = ln * gwb;
        GaussRat right = lnp * gauss_pow(fz, tr.alpha) * gauss_pow(fz.conj(), tr.n) *
                         gauss_pow(gwb, tr.mu);
        if (left != right) {
            out.tensor_law_holds = false;
            out.detail = "leading-coefficient law fails at triple " + tr.str();
        }
    }
    return out;
}

}  // namespace crnf
