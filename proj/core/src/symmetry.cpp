#include "crnf/symmetry.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "crnf/errors.hpp"
#include "crnf/unimodular.hpp"

namespace crnf {

namespace {

long lgcd(long a, long b) { return std::gcd(a, b); }

}  // namespace

AngleRational AngleRational::make(long num, long den) {
    if (den <= 0) raise(ErrorCode::ArithmeticError, "angle denominator must be positive");
    long g = lgcd(std::abs(num), den);
    num /= g;
    den /= g;
    num %= 2 * den;
    if (num < 0) num += 2 * den;
    return AngleRational{num, den};
}

AngleRational AngleRational::operator*(const AngleRational& o) const {
    return make(num * o.den + o.num * den, den * o.den);
}

AngleRational AngleRational::power(long k) const { return make(num * k, den); }

std::optional<GaussRat> AngleRational::realize() const {
    if (den == 1) return num == 0 ? GaussRat(1) : GaussRat(-1);
    if (den == 2) return num == 1 ? GaussRat::i() : -GaussRat::i();
    return std::nullopt;
}

std::string AngleRational::str() const {
    if (num == 0) return "1";
    if (is_minus_one()) return "-1";
    if (den == 2) return num == 1 ? "i" : "-i";
    return "exp(i*pi*" + std::to_string(num) + "/" + std::to_string(den) + ")";
}

std::string TorusElement::str() const {
    return "(" + gamma.str() + ", " + (delta > 0 ? "+1" : "-1") + ")";
}

TorusSubgroup TorusSubgroup::make(bool circle_plus, bool circle_minus,
                                  std::vector<TorusElement> finite) {
    TorusSubgroup g;
    g.circle_plus = circle_plus;
    g.circle_minus = circle_minus;
    for (const auto& e : finite) {
        if ((e.delta > 0 && circle_plus) || (e.delta < 0 && circle_minus))
            raise(ErrorCode::ArithmeticError,
                  "finite element lies in a slice already covered by a circle flag");
    }
    std::sort(finite.begin(), finite.end());
    finite.erase(std::unique(finite.begin(), finite.end()), finite.end());
    g.finite = std::move(finite);
    // closure of the representable part
    for (const auto& a : g.finite)
        for (const auto& b : g.finite) {
            TorusElement p{a.gamma * b.gamma, a.delta * b.delta};
            if (!g.contains(p))
                raise(ErrorCode::ArithmeticError, "finite part is not closed under the group law");
        }
    return g;
}

bool TorusSubgroup::contains(const TorusElement& e) const {
    if (e.delta > 0 && circle_plus) return true;
    if (e.delta < 0 && circle_minus) return true;
    return std::binary_search(finite.begin(), finite.end(), e);
}

std::optional<unsigned long> TorusSubgroup::cardinality() const {
    if (is_infinite()) return std::nullopt;
    return finite.size();
}

void validate_lambda(const LambdaInput& lambda) {
    for (const auto& t : lambda) {
        if (t.alpha < 1) raise(ErrorCode::ArithmeticError, "triple needs alpha >= 1");
        if (t.n < t.alpha) raise(ErrorCode::ArithmeticError, "triple needs n >= alpha");
        if (t.mu < 0) raise(ErrorCode::ArithmeticError, "triple needs mu >= 0");
    }
}

std::string Triple::str() const {
    return "(" + std::to_string(alpha) + "," + std::to_string(n) + "," + std::to_string(mu) + ")";
}

TorusSubgroup group_D(long k, long l) {
    if (k < 0) raise(ErrorCode::ArithmeticError, "D(k,l) needs k >= 0");
    if (k == 0) {
        // gamma free; delta^l = 1 picks the slices
        return TorusSubgroup::make(true, l % 2 == 0, {});
    }
    std::vector<TorusElement> elems;
    for (long p = 0; p < k; ++p) {
        // delta = +1: gamma^k = 1
        elems.push_back({AngleRational::make(2 * p, k), +1});
        // delta = -1: gamma^k = (-1)^l
        if (l % 2 == 0)
            elems.push_back({AngleRational::make(2 * p, k), -1});
        else
            elems.push_back({AngleRational::make(2 * p + 1, k), -1});
    }
    return TorusSubgroup::make(false, false, std::move(elems));
}

TorusSubgroup group_N(const LambdaInput& lambda) {
    validate_lambda(lambda);
    if (lambda.empty()) return TorusSubgroup::make(true, true, {});

    std::vector<std::pair<long, long>> conds;  // (k, l) with gamma^k = (-1)^l required
    long L = 1;
    bool some_positive_k = false;
    for (const auto& t : lambda) {
        long k = t.n - t.alpha;
        conds.push_back({k, t.mu - 1});
        if (k > 0) {
            L = std::lcm(L, k);
            some_positive_k = true;
        }
    }

    bool minus_slice_possible = true;
    for (auto [k, l] : conds)
        if (k == 0 && ((l % 2) + 2) % 2 == 1) minus_slice_possible = false;

    if (!some_positive_k)
        return TorusSubgroup::make(true, minus_slice_possible, {});

    std::vector<TorusElement> elems;
    for (long j = 0; j < 2 * L; ++j) {
        // gamma = e^{i*pi*j/L}
        bool ok_plus = true, ok_minus = minus_slice_possible;
        for (auto [k, l] : conds) {
            if (k == 0) continue;  // handled via slice feasibility
            // gamma^k = e^{i*pi*j*k/L}: must be (+/-)1 as required per slice
            long t = j * k;
            bool integer_multiple = t % L == 0;
            long parity = integer_multiple ? (t / L) % 2 : -1;
            if (!integer_multiple) {
                ok_plus = ok_minus = false;
                break;
            }
            if (parity != 0) ok_plus = false;                       // gamma^k = -1
            if (parity != ((l % 2) + 2) % 2) ok_minus = false;      // gamma^k != (-1)^l
        }
        if (ok_plus) elems.push_back({AngleRational::make(j, L), +1});
        if (ok_minus) elems.push_back({AngleRational::make(j, L), -1});
    }
    return TorusSubgroup::make(false, false, std::move(elems));
}

bool membership_C(const GaussRat& lambda, const Rat& r, long alpha, long n, long mu) {
    if (lambda.is_zero() || r == 0)
        raise(ErrorCode::ArithmeticError, "membership in C needs nonzero parameters");
    GaussRat v = gauss_pow(lambda, alpha) * gauss_pow(lambda.conj(), n);
    GaussRat rr = gauss_pow(GaussRat(r), mu - 1);
    return v * rr == GaussRat(1);
}

Trilean membership_C(const CBall& lambda, const RInterval& r, long alpha, long n, long mu) {
    if (!lambda.certainly_nonzero() || r.contains_zero())
        raise(ErrorCode::Inconclusive, "membership in C not certified: parameter may vanish");
    auto cpow = [](CBall base, long e) {
        if (e < 0) {
            base = base.inverse();
            e = -e;
        }
        CBall out(1);
        while (e > 0) {
            if (e & 1) out *= base;
            e >>= 1;
            if (e > 0) base *= base;
        }
        return out;
    };
    CBall v = cpow(lambda, alpha) * cpow(lambda.conj(), n) * cpow(CBall(RInterval(r), RInterval(r.prec())), mu - 1);
    CBall d = v - CBall(1);
    if (d.is_zero()) return Trilean::True;
    if (d.certainly_nonzero()) return Trilean::False;
    return Trilean::Unknown;
}

GcdInvariants gcd_invariants(const LambdaInput& lambda) {
    validate_lambda(lambda);
    GcdInvariants g;
    for (const auto& t : lambda) {
        unsigned long k = static_cast<unsigned long>(t.n - t.alpha);
        g.g = std::gcd(g.g, k);
        if (t.mu % 2 == 1)
            g.g_plus = std::gcd(g.g_plus, k);
        else
            g.g_minus = std::gcd(g.g_minus, k);
    }
    return g;
}

std::optional<unsigned> ord2(unsigned long k) {
    if (k == 0) return std::nullopt;
    unsigned v = 0;
    while (k % 2 == 0) {
        k /= 2;
        ++v;
    }
    return v;
}

CardinalityResult cardinality_N(const LambdaInput& lambda) {
    CardinalityResult res;
    TorusSubgroup N = group_N(lambda);
    res.count = N.cardinality();

    bool some_mu_even = false;
    for (const auto& t : lambda)
        if (t.mu % 2 == 0) some_mu_even = true;
    if (!some_mu_even || !res.count) return res;

    GcdInvariants g = gcd_invariants(lambda);
    if (g.g == 0) return res;  // no triple with n > alpha: enumeration only

    // ord2(n - alpha) over even-mu triples
    bool constant = true;
    std::optional<std::optional<unsigned>> seen;
    for (const auto& t : lambda) {
        if (t.mu % 2 != 0) continue;
        auto o = ord2(static_cast<unsigned long>(t.n - t.alpha));
        if (!seen)
            seen = o;
        else if (*seen != o)
            constant = false;
    }
    auto op = ord2(g.g_plus), om = ord2(g.g_minus);
    auto ge = [](const std::optional<unsigned>& a, const std::optional<unsigned>& b) {
        if (!a) return true;       // infinity >= anything
        if (!b) return false;      // finite >= infinity fails
        return *a >= *b;
    };
    res.formula_applicable = true;
    res.formula_value = (!constant || ge(om, op)) ? g.g : 2 * g.g;
    if (res.formula_value != *res.count)
        raise(ErrorCode::FormulaMismatch,
              "closed-form group order " + std::to_string(res.formula_value) +
                  " disagrees with enumeration " + std::to_string(*res.count));
    return res;
}

CaseAB case_AB(const Triple& t, const Triple& tt) {
    if (t == tt) raise(ErrorCode::ArithmeticError, "case analysis needs two distinct triples");
    long lhs = tt.mu * (t.alpha + t.n) - t.mu * (tt.alpha + tt.n);
    long rhs = (t.alpha + t.n) - (tt.alpha + tt.n);
    return lhs == rhs ? CaseAB::CaseA : CaseAB::CaseB;
}

namespace {

// designated triple: lexicographically smallest with alpha != n
std::optional<Triple> designated_triple(const LambdaInput& lambda) {
    std::optional<Triple> best;
    for (const auto& t : lambda)
        if (t.alpha != t.n && (!best || t < *best)) best = t;
    return best;
}

struct Hypotheses {
    bool prereqs = false;    // two distinct triples and one with alpha != n
    bool applicable = false; // prereqs plus the sum/fraction condition
    std::string reason;
    Triple designated;
    bool sum_equal = false;           // some other triple with the same alpha+n
    std::optional<Rat> common_fraction;  // set when all fractions share one value
};

Hypotheses check_hypotheses(const LambdaInput& lambda) {
    Hypotheses h;
    std::set<Triple> uniq(lambda.begin(), lambda.end());
    if (uniq.size() < 2) {
        h.reason = "needs at least two distinct triples";
        return h;
    }
    auto des = designated_triple(lambda);
    if (!des) {
        h.reason = "needs a triple with n != alpha";
        return h;
    }
    h.prereqs = true;
    h.designated = *des;
    long S = des->alpha + des->n;
    bool all_same = true;
    std::optional<Rat> common;
    for (const auto& t : uniq) {
        if (t == *des) continue;
        long St = t.alpha + t.n;
        if (St == S) {
            h.sum_equal = true;
            continue;
        }
        Rat f = rat_from_parts(St * des->mu - S * t.mu, St - S);
        if (!common)
            common = f;
        else if (*common != f)
            all_same = false;
    }
    bool fraction_blocks = false;  // fraction condition FAILS to trigger finiteness
    if (!h.sum_equal && all_same && common) {
        // is the common value a positive integer?
        if (common->get_den() == 1 && common->get_num() > 0) {
            fraction_blocks = true;
            h.common_fraction = *common;
        }
    }
    h.applicable = h.sum_equal || !fraction_blocks;
    if (!h.applicable)
        h.reason = "the cross-ratio is the same positive integer for every second triple";
    return h;
}

}  // namespace

FinitenessDecision finiteness_decision(const LambdaInput& lambda) {
    validate_lambda(lambda);
    FinitenessDecision d;
    d.kind = FinitenessDecision::Kind::NotApplicable;
    Hypotheses h = check_hypotheses(lambda);
    if (!h.prereqs) {  // fewer than two triples or no alpha != n
        d.reason = h.reason;
        return d;
    }
    d.designated = h.designated;
    d.dim_at_most_one = true;
    if (h.applicable) {
        // some sums agree, or the fraction is not one fixed positive integer
        d.kind = FinitenessDecision::Kind::Finite;
        d.bound = 2 * (h.designated.n - h.designated.alpha);
        return d;
    }
    d.kind = FinitenessDecision::Kind::JetEmbedOnly;
    // here every fraction equals one positive integer
    long v = static_cast<long>(h.common_fraction->get_num().get_si());
    d.jet_order = v >= 2 ? v : 1;
    return d;
}

TrivialityDecision triviality_decision(const LambdaInput& lambda) {
    validate_lambda(lambda);
    TrivialityDecision d;
    d.kind = TrivialityDecision::Kind::NotApplicable;
    Hypotheses h = check_hypotheses(lambda);
    if (!h.applicable) {
        d.reason = h.reason;
        return d;
    }
    GcdInvariants g = gcd_invariants(lambda);
    bool gcd_one = g.g == 1;
    bool has_even_mu = false, cond_i = false, cond_ii = false;
    for (const auto& t : lambda) {
        long k = t.n - t.alpha;
        if (t.mu % 2 == 0) {
            has_even_mu = true;
            if (k % 2 == 0) cond_i = true;
        } else {
            if (k % 2 == 1) cond_ii = true;
        }
    }
    if (gcd_one && has_even_mu && (cond_i || cond_ii)) {
        d.kind = TrivialityDecision::Kind::Trivial;
        return d;
    }
    d.kind = TrivialityDecision::Kind::NontrivialPossible;
    TorusSubgroup N = group_N(lambda);
    if (!has_even_mu) {
        d.witness = TorusElement{AngleRational::make(0, 1), -1};  // (z, -w)
        d.reason = "every mu is odd";
    } else if (!gcd_one) {
        d.witness = TorusElement{AngleRational::make(2, static_cast<long>(g.g)), +1};
        d.reason = "gcd of n - alpha exceeds 1";
    } else {
        d.witness = TorusElement{AngleRational::make(1, 1), -1};  // (-z, -w)
        d.at_most_two = true;
        d.reason = "both parity clauses fail";
    }
    if (d.witness && !N.contains(*d.witness))
        raise(ErrorCode::ArithmeticError, "claimed witness is not in the group");
    return d;
}

long jet_order(const Triple& t, const Triple& tt) {
    if (t == tt) raise(ErrorCode::ArithmeticError, "jet order needs two distinct triples");
    long S = t.alpha + t.n, St = tt.alpha + tt.n;
    if (S == St) return 1;
    Rat f = rat_from_parts(St * t.mu - S * tt.mu, St - S);
    if (f.get_den() == 1 && f.get_num() >= 2) return static_cast<long>(f.get_num().get_si());
    return 1;
}

}  // namespace crnf
