#include <benchmark/benchmark.h>

#include <random>

#include "crnf/normalform.hpp"

using namespace crnf;

namespace {

MultiSeries dense_series(int trunc, int seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9), e(0, trunc / 2);
    MultiSeries s(kQVars, trunc);
    for (int i = 0; i < 60; ++i) {
        std::array<unsigned, 4> ex{static_cast<unsigned>(e(rng)), static_cast<unsigned>(e(rng)),
                                   static_cast<unsigned>(e(rng)), 0};
        if (ex[0] + ex[1] + ex[2] > static_cast<unsigned>(trunc)) continue;
        s = s + MultiSeries::monomial(kQVars, trunc, MultiIndex(ex),
                                      GaussRat(Rat(num(rng), den(rng)), Rat(num(rng), den(rng))));
    }
    return s;
}

MultiSeries model_phi(int d) {
    auto half = GaussRat(Rat(1, 2));
    return MultiSeries::monomial(kPhiVars, d, MultiIndex({1, 3, 1, 0}), GaussRat(2) * half) +
           MultiSeries::monomial(kPhiVars, d, MultiIndex({3, 1, 1, 0}), GaussRat(2) * half) +
           MultiSeries::monomial(kPhiVars, d, MultiIndex({3, 4, 0, 0}), GaussRat(Rat(3, 2)) * half) +
           MultiSeries::monomial(kPhiVars, d, MultiIndex({4, 3, 0, 0}), GaussRat(Rat(3, 2)) * half);
}

void BM_series_mul(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    MultiSeries a = dense_series(d, 1), b = dense_series(d, 2);
    for (auto _ : state) benchmark::DoNotOptimize(MultiSeries::mul(a, b));
}
BENCHMARK(BM_series_mul)->Arg(8)->Arg(12)->Arg(16);

void BM_phi_to_q(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    PhiForm m = validate_phi(model_phi(d));
    for (auto _ : state) benchmark::DoNotOptimize(phi_to_q(m));
}
BENCHMARK(BM_phi_to_q)->Arg(8)->Arg(12)->Arg(16);

void BM_pullback(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    QForm q = phi_to_q(validate_phi(model_phi(d)));
    FormalMap h = make_map(MultiSeries::variable(kMapVars, d, 0).scaled(GaussRat(-1)),
                           MultiSeries::variable(kMapVars, d, 1).scaled(GaussRat(Rat(1, 2))));
    for (auto _ : state) benchmark::DoNotOptimize(pullback(q, h));
}
BENCHMARK(BM_pullback)->Arg(8)->Arg(12)->Arg(16);

void BM_normalize(benchmark::State& state) {
    int d = static_cast<int>(state.range(0));
    QForm q = phi_to_q(validate_phi(model_phi(d)));
    NormalizeOptions opts;
    opts.leading_coefficient_complete = true;
    for (auto _ : state) benchmark::DoNotOptimize(normalize(q, d, opts));
}
BENCHMARK(BM_normalize)->Arg(8)->Arg(12)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
