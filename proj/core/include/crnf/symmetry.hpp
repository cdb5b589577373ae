#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crnf/ball.hpp"
#include "crnf/rational.hpp"

namespace crnf {

// e^{i*pi*num/den}; reduced fraction with num normalized into [0, 2*den).
struct AngleRational {
    long num = 0;
    long den = 1;

    static AngleRational make(long num, long den);

    bool is_one() const { return num == 0; }
    bool is_minus_one() const { return num == den; }

    AngleRational operator*(const AngleRational& o) const;
    AngleRational power(long k) const;
    AngleRational inverse() const { return power(-1); }

    // exact complex value when it lies in Q(i), i.e. den | 2
    std::optional<GaussRat> realize() const;

    // value num/den in units of pi (in [0,2))
    Rat turns_pi() const { return Rat(num, den); }

    friend bool operator==(const AngleRational& a, const AngleRational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const AngleRational& a, const AngleRational& b) {
        return a.num * b.den < b.num * a.den;
    }
    std::string str() const;
};

struct TorusElement {
    AngleRational gamma;
    int delta = 1;  // +1 or -1

    friend bool operator==(const TorusElement& a, const TorusElement& b) {
        return a.gamma == b.gamma && a.delta == b.delta;
    }
    friend bool operator<(const TorusElement& a, const TorusElement& b) {
        if (a.delta != b.delta) return a.delta > b.delta;  // +1 slice first
        return a.gamma < b.gamma;
    }
    std::string str() const;
};

// Subgroup of U(1) x {+1,-1}: full-circle slices are carried as flags, the
// rest as an explicit element list. Finite elements never duplicate a slice
// that a circle flag already covers.
struct TorusSubgroup {
    bool circle_plus = false;
    bool circle_minus = false;
    std::vector<TorusElement> finite;  // sorted

    static TorusSubgroup make(bool circle_plus, bool circle_minus,
                              std::vector<TorusElement> finite);

    bool contains(const TorusElement& e) const;
    bool is_infinite() const { return circle_plus || circle_minus; }
    // element count; empty when infinite
    std::optional<unsigned long> cardinality() const;
};

struct Triple {
    long alpha = 1;
    long n = 1;
    long mu = 0;

    friend bool operator==(const Triple& a, const Triple& b) {
        return a.alpha == b.alpha && a.n == b.n && a.mu == b.mu;
    }
    friend bool operator<(const Triple& a, const Triple& b) {
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        if (a.n != b.n) return a.n < b.n;
        return a.mu < b.mu;
    }
    std::string str() const;
};

using LambdaInput = std::vector<Triple>;

void validate_lambda(const LambdaInput& lambda);

// {(gamma, delta) : gamma^k * delta^l = 1}
TorusSubgroup group_D(long k, long l);

// intersection of D(n-alpha, mu-1) over the triples
TorusSubgroup group_N(const LambdaInput& lambda);

// lambda^alpha * conj(lambda)^n * r^(mu-1) == 1
bool membership_C(const GaussRat& lambda, const Rat& r, long alpha, long n, long mu);

enum class Trilean { False, True, Unknown };
Trilean membership_C(const CBall& lambda, const RInterval& r, long alpha, long n, long mu);

struct GcdInvariants {
    unsigned long g = 0;        // gcd over all triples of n - alpha
    unsigned long g_plus = 0;   // over mu odd
    unsigned long g_minus = 0;  // over mu even
};
GcdInvariants gcd_invariants(const LambdaInput& lambda);

// 2-adic valuation; empty = infinite (ord2(0))
std::optional<unsigned> ord2(unsigned long k);

struct CardinalityResult {
    std::optional<unsigned long> count;  // empty when the group is infinite
    bool formula_applicable = false;     // some mu even and the group is finite
    unsigned long formula_value = 0;     // meaningful when formula_applicable
};
// Enumerates group_N; when the closed-form count applies it is evaluated as a
// cross-check and a FormulaMismatch error is raised on disagreement.
CardinalityResult cardinality_N(const LambdaInput& lambda);

enum class CaseAB { CaseA, CaseB };
CaseAB case_AB(const Triple& t, const Triple& tt);

struct FinitenessDecision {
    enum class Kind { NotApplicable, Finite, JetEmbedOnly } kind;
    std::string reason;             // for NotApplicable
    Triple designated;              // the triple with alpha != n used in the conditions
    long bound = 0;                 // 2*(n-alpha), Finite only
    long jet_order = 0;             // JetEmbedOnly only
    bool dim_at_most_one = false;   // holds whenever applicable
};
FinitenessDecision finiteness_decision(const LambdaInput& lambda);

struct TrivialityDecision {
    enum class Kind { NotApplicable, Trivial, NontrivialPossible } kind;
    std::string reason;
    std::optional<TorusElement> witness;  // a nontrivial element of N when not trivial
    bool at_most_two = false;  // all hypotheses except the parity clauses hold
    // the parity clause quantifies mu over the whole input set
    static constexpr const char* kParityReadingNote =
        "parity clause (ii) read as: some triple of the input set has both mu and n-alpha odd";
};
TrivialityDecision triviality_decision(const LambdaInput& lambda);

// jet order for a chosen pair of triples
long jet_order(const Triple& t, const Triple& tt);

}  // namespace crnf
