#pragma once

#include <random>
#include <vector>

#include "crnf/series.hpp"

namespace crnf::testutil {

inline GaussRat gr(long num, long den = 1) { return GaussRat(Rat(num, den)); }
inline GaussRat gi(long rn, long rd, long in_, long id) {
    return GaussRat(Rat(rn, rd), Rat(in_, id));
}

inline MultiSeries mono(const Vars& vars, int trunc, std::vector<unsigned> exps,
                        const GaussRat& c) {
    std::array<unsigned, 4> e{0, 0, 0, 0};
    for (size_t i = 0; i < exps.size(); ++i) e[i] = exps[i];
    return MultiSeries::monomial(vars, trunc, MultiIndex(e), c);
}

// sparse random series with small rational coefficients
inline MultiSeries random_series(std::mt19937& rng, const Vars& vars, int trunc, int nterms,
                                 bool complex_coeffs = true, unsigned min_total = 0) {
    MultiSeries s(vars, trunc);
    std::uniform_int_distribution<int> num(-10, 10), den(1, 10), exp(0, trunc);
    for (int t = 0; t < nterms; ++t) {
        std::array<unsigned, 4> e{0, 0, 0, 0};
        unsigned total = 0;
        for (size_t v = 0; v < vars.size(); ++v) {
            e[v] = static_cast<unsigned>(exp(rng) / static_cast<int>(vars.size()));
            total += e[v];
        }
        if (total > static_cast<unsigned>(trunc) || total < min_total) continue;
        GaussRat c(Rat(num(rng), den(rng)), complex_coeffs ? Rat(num(rng), den(rng)) : Rat(0));
        s = MultiSeries::add(s, MultiSeries::monomial(vars, trunc, MultiIndex(e), c));
    }
    return s;
}

}  // namespace crnf::testutil
