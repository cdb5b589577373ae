#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crnf/errors.hpp"
#include "crnf/multiindex.hpp"
#include "crnf/rational.hpp"

namespace crnf {

template <class K>
struct scalar_traits {
    static constexpr bool exact = true;
};

using Vars = std::vector<std::string>;

inline int var_index(const Vars& vars, const std::string& name) {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name) return static_cast<int>(i);
    return -1;
}

// Sparse formal power series truncated at a total degree. Terms are kept in
// graded order, never zero, never beyond the truncation order. Truncation of
// any arithmetic result is the minimum of the operands' truncations, so every
// stored coefficient is exact.
template <class K>
class Series {
public:
    using Term = std::pair<MultiIndex, K>;

    Series() : trunc_(0) {}

    Series(Vars vars, int trunc) : vars_(std::move(vars)), trunc_(trunc) {
        check_vars();
    }

    static Series monomial(Vars vars, int trunc, const MultiIndex& mi, const K& c) {
        Series s(std::move(vars), trunc);
        if (mi.total() <= static_cast<unsigned>(trunc) && !c.is_zero())
            s.terms_.push_back({mi, c});
        return s;
    }

    static Series constant(Vars vars, int trunc, const K& c) {
        return monomial(std::move(vars), trunc, MultiIndex(), c);
    }

    static Series variable(Vars vars, int trunc, int var) {
        return monomial(std::move(vars), trunc, MultiIndex::unit(var), K(1));
    }

    const Vars& vars() const { return vars_; }
    int arity() const { return static_cast<int>(vars_.size()); }
    int trunc() const { return trunc_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    K coefficient(const MultiIndex& mi) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), mi,
                                   [](const Term& t, const MultiIndex& m) { return t.first < m; });
        if (it != terms_.end() && it->first == mi) return it->second;
        return K(0);
    }

    K constant_term() const { return coefficient(MultiIndex()); }

    // Smallest total degree with a stored term; empty when zero to truncation.
    std::optional<unsigned> valuation() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().first.total();
    }

    unsigned max_degree() const { return terms_.empty() ? 0u : terms_.back().first.total(); }

    Series truncated(int d) const {
        Series r(vars_, std::min(d, trunc_));
        for (const auto& t : terms_) {
            if (t.first.total() > static_cast<unsigned>(r.trunc_)) break;
            r.terms_.push_back(t);
        }
        return r;
    }

    // Relabel the truncation order. Raising it asserts (caller's obligation)
    // that the dropped tail cannot reach the new order in later products;
    // needed when a coefficient series re-enters with its degree offset.
    Series with_trunc(int d) const {
        Series r(vars_, d);
        for (const auto& t : terms_) {
            if (t.first.total() > static_cast<unsigned>(d)) break;
            r.terms_.push_back(t);
        }
        return r;
    }

    // Homogeneous part of one total degree (truncation preserved).
    Series homogeneous_part(unsigned d) const {
        Series r(vars_, trunc_);
        for (const auto& t : terms_)
            if (t.first.total() == d) r.terms_.push_back(t);
        return r;
    }

    Series operator-() const {
        Series r(vars_, trunc_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.first, -t.second});
        return r;
    }

    friend bool operator==(const Series& a, const Series& b) {
        if (a.vars_ != b.vars_ || a.trunc_ != b.trunc_) return false;
        if (a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].first != b.terms_[i].first || !(a.terms_[i].second == b.terms_[i].second))
                return false;
        return true;
    }
    friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }

    // Same coefficient table up to degree d (ignores declared truncations).
    static bool equal_to_degree(const Series& a, const Series& b, int d) {
        return sub(a.truncated(d), b.truncated(d)).is_zero();
    }

    static void check_compatible(const Series& a, const Series& b) {
        if (a.vars_ != b.vars_)
            raise(ErrorCode::VariableMismatch, "operands declare different variable lists");
    }

    static Series add(const Series& a, const Series& b) { return merge(a, b, false); }
    static Series sub(const Series& a, const Series& b) { return merge(a, b, true); }

    static Series mul(const Series& a, const Series& b) {
        check_compatible(a, b);
        int t = std::min(a.trunc_, b.trunc_);
        Series r(a.vars_, t);
        if (a.terms_.empty() || b.terms_.empty()) return r;
        std::unordered_map<uint64_t, K> acc;
        acc.reserve(a.terms_.size() * 2 + b.terms_.size());
        std::unordered_map<uint64_t, MultiIndex> keys;
        for (const auto& ta : a.terms_) {
            unsigned da = ta.first.total();
            if (da > static_cast<unsigned>(t)) break;
            for (const auto& tb : b.terms_) {
                if (da + tb.first.total() > static_cast<unsigned>(t)) break;
                MultiIndex mi = ta.first + tb.first;
                auto [it, fresh] = acc.try_emplace(mi.key(), K(0));
                it->second += ta.second * tb.second;
                if (fresh) keys.emplace(mi.key(), mi);
            }
        }
        r.terms_.reserve(acc.size());
        for (auto& kv : acc) {
            if (!kv.second.is_zero()) r.terms_.push_back({keys.at(kv.first), std::move(kv.second)});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first < y.first; });
        return r;
    }

    Series scaled(const K& c) const {
        Series r(vars_, trunc_);
        if (c.is_zero()) return r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            K v = t.second * c;
            if (!v.is_zero()) r.terms_.push_back({t.first, std::move(v)});
        }
        return r;
    }

    friend Series operator+(const Series& a, const Series& b) { return add(a, b); }
    friend Series operator-(const Series& a, const Series& b) { return sub(a, b); }
    friend Series operator*(const Series& a, const Series& b) { return mul(a, b); }

    static Series pow(const Series& a, unsigned k) {
        Series r = constant(a.vars_, a.trunc_, K(1));
        Series base = a;
        unsigned e = k;
        while (e > 0) {
            if (e & 1u) r = mul(r, base);
            e >>= 1u;
            if (e > 0) base = mul(base, base);
        }
        return r;
    }

    Series conj_coeffs() const {
        Series r(vars_, trunc_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) r.terms_.push_back({t.first, t.second.conj()});
        return r;
    }

    // Conjugate coefficients and transport exponents along an involution of
    // the variable positions (entry i holds the image of position i).
    Series conj_swap(const std::array<int, 4>& involution) const {
        for (int i = 0; i < arity(); ++i) {
            int j = involution[static_cast<size_t>(i)];
            if (j < 0 || j >= arity() || involution[static_cast<size_t>(j)] != i)
                raise(ErrorCode::VariableMismatch, "pairing is not an involution of the variables");
        }
        Series r(vars_, trunc_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            std::array<unsigned, 4> e{0, 0, 0, 0};
            for (int i = 0; i < arity(); ++i)
                e[static_cast<size_t>(involution[static_cast<size_t>(i)])] = t.first[i];
            r.terms_.push_back({MultiIndex(e), t.second.conj()});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first < y.first; });
        return r;
    }

    // Move the series into another variable list: position i of this series
    // becomes position map[i] of new_vars. Optionally conjugates coefficients
    // (the bar operation composed with a renaming, e.g. F(z,w) -> Fbar(zb,tau)).
    Series transplant(const Vars& new_vars, const std::array<int, 4>& map, bool conjugate) const {
        Series r(new_vars, trunc_);
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            std::array<unsigned, 4> e{0, 0, 0, 0};
            for (int i = 0; i < arity(); ++i) {
                if (t.first[i] > 0) {
                    int j = map[static_cast<size_t>(i)];
                    if (j < 0 || j >= static_cast<int>(new_vars.size()))
                        raise(ErrorCode::VariableMismatch, "transplant map out of range");
                    e[static_cast<size_t>(j)] = t.first[i];
                }
            }
            r.terms_.push_back({MultiIndex(e), conjugate ? t.second.conj() : t.second});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first < y.first; });
        return r;
    }

    // d/d(var), exponents shifted down, coefficients multiplied by the exponent.
    Series derivative(int var) const {
        Series r(vars_, std::max(trunc_ - 1, 0));
        for (const auto& t : terms_) {
            unsigned e = t.first[var];
            if (e == 0) continue;
            std::array<unsigned, 4> ex = t.first.exponents();
            ex[static_cast<size_t>(var)] = e - 1;
            K c = t.second * K(static_cast<long>(e));
            if (!c.is_zero()) r.terms_.push_back({MultiIndex(ex), std::move(c)});
        }
        std::sort(r.terms_.begin(), r.terms_.end(),
                  [](const Term& x, const Term& y) { return x.first < y.first; });
        return r;
    }

private:
    void check_vars() const {
        if (vars_.empty() || vars_.size() > MultiIndex::kMaxVars)
            raise(ErrorCode::VariableMismatch, "series arity must be between 1 and 4");
        if (trunc_ < 0) raise(ErrorCode::ArithmeticError, "negative truncation order");
    }

    static Series merge(const Series& a, const Series& b, bool subtract) {
        check_compatible(a, b);
        Series r(a.vars_, std::min(a.trunc_, b.trunc_));
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        size_t i = 0, j = 0;
        unsigned cap = static_cast<unsigned>(r.trunc_);
        while (i < a.terms_.size() || j < b.terms_.size()) {
            bool take_a;
            if (i >= a.terms_.size())
                take_a = false;
            else if (j >= b.terms_.size())
                take_a = true;
            else if (a.terms_[i].first == b.terms_[j].first) {
                K v = subtract ? a.terms_[i].second - b.terms_[j].second
                               : a.terms_[i].second + b.terms_[j].second;
                if (!v.is_zero() && a.terms_[i].first.total() <= cap)
                    r.terms_.push_back({a.terms_[i].first, std::move(v)});
                ++i;
                ++j;
                continue;
            } else
                take_a = a.terms_[i].first < b.terms_[j].first;
            if (take_a) {
                if (a.terms_[i].first.total() <= cap) r.terms_.push_back(a.terms_[i]);
                ++i;
            } else {
                const auto& t = b.terms_[j];
                if (t.first.total() <= cap) {
                    K v = subtract ? -t.second : t.second;
                    r.terms_.push_back({t.first, std::move(v)});
                }
                ++j;
            }
        }
        return r;
    }

    Vars vars_;
    int trunc_;
    std::vector<Term> terms_;
};

using MultiSeries = Series<GaussRat>;

// ---------------------------------------------------------------------------
// Composition

// Formal composition: replace the bound variables of f with the given series,
// all of which must share one target variable list. Unbound variables of f map
// to the target variable of the same name. A binding with nonzero constant
// term is rejected: reconstructing the image would need the (unknown) source
// coefficients beyond the truncation order.
template <class K>
Series<K> substitute(const Series<K>& f, const std::vector<std::pair<int, Series<K>>>& bindings) {
    if (bindings.empty()) return f;
    const Vars& target = bindings.front().second.vars();
    int t = f.trunc();
    for (const auto& [v, g] : bindings) {
        if (v < 0 || v >= f.arity())
            raise(ErrorCode::VariableMismatch, "binding refers to a variable not in the series");
        if (g.vars() != target)
            raise(ErrorCode::VariableMismatch, "all bound series must share one variable list");
        t = std::min(t, g.trunc());
    }
    std::array<int, 4> unbound_map{-1, -1, -1, -1};
    std::array<const Series<K>*, 4> bound{nullptr, nullptr, nullptr, nullptr};
    for (const auto& [v, g] : bindings) bound[static_cast<size_t>(v)] = &g;
    for (int i = 0; i < f.arity(); ++i) {
        if (bound[static_cast<size_t>(i)]) {
            if (!bound[static_cast<size_t>(i)]->constant_term().is_zero()) {
                bool occurs = false;
                for (const auto& term : f.terms())
                    if (term.first[i] > 0) occurs = true;
                if (occurs)
                    raise(ErrorCode::ConstantTermSubstitution,
                          "binding for '" + f.vars()[static_cast<size_t>(i)] +
                              "' has a nonzero constant term");
            }
            continue;
        }
        int j = var_index(target, f.vars()[static_cast<size_t>(i)]);
        if (j < 0) {
            bool occurs = false;
            for (const auto& term : f.terms())
                if (term.first[i] > 0) occurs = true;
            if (occurs)
                raise(ErrorCode::VariableMismatch,
                      "unbound variable '" + f.vars()[static_cast<size_t>(i)] +
                          "' missing from the target variable list");
        }
        unbound_map[static_cast<size_t>(i)] = j;
    }

    // power caches for the bound series
    std::array<std::vector<Series<K>>, 4> pows;
    auto power_of = [&](int v, unsigned e) -> const Series<K>& {
        auto& cache = pows[static_cast<size_t>(v)];
        if (cache.empty()) {
            cache.push_back(Series<K>::constant(target, t, K(1)));
            cache.push_back(bound[static_cast<size_t>(v)]->truncated(t));
        }
        while (cache.size() <= e) cache.push_back(Series<K>::mul(cache.back(), cache[1]));
        return cache[e];
    };

    Series<K> result(target, t);
    for (const auto& term : f.terms()) {
        std::array<unsigned, 4> base{0, 0, 0, 0};
        for (int i = 0; i < f.arity(); ++i)
            if (term.first[i] > 0 && !bound[static_cast<size_t>(i)])
                base[static_cast<size_t>(unbound_map[static_cast<size_t>(i)])] = term.first[i];
        Series<K> acc = Series<K>::monomial(target, t, MultiIndex(base), term.second);
        for (int i = 0; i < f.arity() && !acc.is_zero(); ++i)
            if (term.first[i] > 0 && bound[static_cast<size_t>(i)])
                acc = Series<K>::mul(acc, power_of(i, term.first[i]));
        result = Series<K>::add(result, acc);
    }
    return result;
}

template <class K>
Series<K> substitute(const Series<K>& f, const std::string& var, const Series<K>& g) {
    int v = var_index(f.vars(), var);
    if (v < 0) raise(ErrorCode::VariableMismatch, "no variable '" + var + "' in the series");
    return substitute(f, std::vector<std::pair<int, Series<K>>>{{v, g}});
}

// ---------------------------------------------------------------------------
// Analytic primitives

namespace scalar_power_series_detail {
template <class K>
K upow(K base, unsigned e) {
    K r(1);
    while (e > 0) {
        if (e & 1u) r *= base;
        e >>= 1u;
        if (e > 0) base *= base;
    }
    return r;
}
}  // namespace scalar_power_series_detail

// principal scalar root hook; the interval overload lives in ball.hpp
template <class K>
K principal_root_scalar(const K&, unsigned) {
    raise(ErrorCode::ArithmeticError, "principal root only defined for interval scalars");
}

// Total-degree order of the first nonzero coefficient. Empty result means the
// series vanishes to its truncation order (not necessarily identically).
template <class K>
std::optional<unsigned> vanishing_order(const Series<K>& u) {
    return u.valuation();
}

// r with r^n = u and r(0) = 1, for u(0) = 1, exact to the truncation of u.
// In interval mode the constant term must enclose 1 and the root starts from
// its principal enclosure.
template <class K>
Series<K> nth_root(const Series<K>& u, unsigned n) {
    if (n == 0) raise(ErrorCode::ArithmeticError, "0th root");
    K u0 = u.constant_term();
    K r0(1);
    if constexpr (scalar_traits<K>::exact) {
        if (!(u0 == K(1))) raise(ErrorCode::NotUnitConstant, "nth_root needs constant term 1");
    } else {
        if (!(u0 - K(1)).contains_zero())
            raise(ErrorCode::NotUnitConstant, "nth_root needs a constant term enclosing 1");
        r0 = principal_root_scalar(u0, n);
    }
    const int D = u.trunc();
    K inv_lead = (K(static_cast<long>(n)) * scalar_power_series_detail::upow(r0, n - 1)).inverse();
    Series<K> r = Series<K>::constant(u.vars(), D, r0);
    for (int d = 1; d <= D; ++d) {
        Series<K> delta = Series<K>::sub(u, Series<K>::pow(r, n)).homogeneous_part(static_cast<unsigned>(d));
        if (!delta.is_zero()) r = Series<K>::add(r, delta.scaled(inv_lead));
    }
    return r;
}

// 1/u for u with invertible constant term.
template <class K>
Series<K> reciprocal(const Series<K>& u) {
    K u0 = u.constant_term();
    if (u0.is_zero()) raise(ErrorCode::NotInvertible, "reciprocal of a series vanishing at 0");
    K inv0 = u0.inverse();
    const int D = u.trunc();
    Series<K> r = Series<K>::constant(u.vars(), D, inv0);
    Series<K> one = Series<K>::constant(u.vars(), D, K(1));
    for (int d = 1; d <= D; ++d) {
        Series<K> e = Series<K>::sub(one, Series<K>::mul(u, r)).homogeneous_part(static_cast<unsigned>(d));
        if (!e.is_zero()) r = Series<K>::add(r, e.scaled(inv0));
    }
    return r;
}

// Iterate builder until the truncated value stabilizes. The builder must
// raise the valuation of the residual error by at least `gain` per call.
template <class K>
Series<K> solve_fixed_point(const std::function<Series<K>(const Series<K>&)>& builder,
                            unsigned gain, int D, const Series<K>& initial) {
    if (gain == 0) raise(ErrorCode::ArithmeticError, "fixed point gain must be >= 1");
    int budget = D / static_cast<int>(gain) + 2;
    Series<K> x = initial.truncated(D);
    for (int it = 0; it < budget; ++it) {
        Series<K> next = builder(x).truncated(D);
        if constexpr (scalar_traits<K>::exact) {
            if (next == x) return x;
        }
        x = std::move(next);
    }
    if constexpr (scalar_traits<K>::exact) {
        Series<K> next = builder(x).truncated(D);
        if (next == x) return x;
        raise(ErrorCode::NoConvergence,
              "fixed point not stable within the iteration budget (gain contract violated)");
    }
    return x;
}

// Compositional inverse of a univariate series with psi(0)=0, psi'(0) != 0.
template <class K>
Series<K> invert_univariate(const Series<K>& psi) {
    if (psi.arity() != 1) raise(ErrorCode::VariableMismatch, "univariate series expected");
    if (!psi.constant_term().is_zero())
        raise(ErrorCode::NotInvertible, "series does not vanish at 0");
    K c = psi.coefficient(MultiIndex::unit(0));
    if (c.is_zero()) raise(ErrorCode::NotInvertible, "vanishing linear coefficient");
    K cinv = c.inverse();
    const int D = psi.trunc();
    Series<K> idser = Series<K>::variable(psi.vars(), D, 0);
    Series<K> tail = Series<K>::sub(psi, idser.scaled(c));  // psi - c*x
    auto builder = [&](const Series<K>& s) {
        return Series<K>::sub(idser, substitute(tail, psi.vars()[0], s)).scaled(cinv);
    };
    return solve_fixed_point<K>(builder, 1, D, Series<K>(psi.vars(), D));
}

// Coefficient series in the remaining variables once some exponents are fixed.
template <class K>
Series<K> coeff_extract(const Series<K>& f, const std::vector<std::pair<int, unsigned>>& fixed) {
    if (fixed.empty() || static_cast<int>(fixed.size()) >= f.arity())
        raise(ErrorCode::VariableMismatch, "fixed assignment must cover a strict subset of variables");
    std::array<int, 4> fixed_exp{-1, -1, -1, -1};
    unsigned fixed_total = 0;
    for (auto [v, e] : fixed) {
        if (v < 0 || v >= f.arity() || fixed_exp[static_cast<size_t>(v)] >= 0)
            raise(ErrorCode::VariableMismatch, "bad fixed-exponent assignment");
        fixed_exp[static_cast<size_t>(v)] = static_cast<int>(e);
        fixed_total += e;
    }
    Vars rest;
    std::array<int, 4> pos{-1, -1, -1, -1};
    for (int i = 0; i < f.arity(); ++i)
        if (fixed_exp[static_cast<size_t>(i)] < 0) {
            pos[static_cast<size_t>(i)] = static_cast<int>(rest.size());
            rest.push_back(f.vars()[static_cast<size_t>(i)]);
        }
    int t = f.trunc() - static_cast<int>(fixed_total);
    Series<K> r(rest, std::max(t, 0));
    if (t < 0) return r;
    std::vector<typename Series<K>::Term> out;
    for (const auto& term : f.terms()) {
        bool match = true;
        for (int i = 0; i < f.arity() && match; ++i)
            if (fixed_exp[static_cast<size_t>(i)] >= 0 &&
                term.first[i] != static_cast<unsigned>(fixed_exp[static_cast<size_t>(i)]))
                match = false;
        if (!match) continue;
        std::array<unsigned, 4> e{0, 0, 0, 0};
        for (int i = 0; i < f.arity(); ++i)
            if (pos[static_cast<size_t>(i)] >= 0)
                e[static_cast<size_t>(pos[static_cast<size_t>(i)])] = term.first[i];
        out.push_back({MultiIndex(e), term.second});
    }
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    Series<K> acc(rest, t);
    for (auto& term : out)
        acc = Series<K>::add(acc, Series<K>::monomial(rest, t, term.first, term.second));
    return acc;
}

template <class K>
Series<K> coeff_extract(const Series<K>& f,
                        const std::vector<std::pair<std::string, unsigned>>& fixed) {
    std::vector<std::pair<int, unsigned>> idx;
    for (const auto& [name, e] : fixed) {
        int v = var_index(f.vars(), name);
        if (v < 0) raise(ErrorCode::VariableMismatch, "no variable '" + name + "' in the series");
        idx.push_back({v, e});
    }
    return coeff_extract(f, idx);
}

// ---------------------------------------------------------------------------
// Canonical text form (graded order, one term per line); golden-test format.

inline std::string canonical_text(const MultiSeries& f) {
    if (f.is_zero()) return "0\n";
    std::string out;
    for (const auto& term : f.terms()) {
        const Rat& re = term.second.re;
        const Rat& im = term.second.im;
        out += "(" + re.get_num().get_str() + "/" + re.get_den().get_str() + ")+(" +
               im.get_num().get_str() + "/" + im.get_den().get_str() + ")i *";
        for (int i = 0; i < f.arity(); ++i)
            out += " " + f.vars()[static_cast<size_t>(i)] + "^" + std::to_string(term.first[i]);
        out += "\n";
    }
    return out;
}

}  // namespace crnf
