#include <benchmark/benchmark.h>

#include "abelcount/counting.hpp"

using namespace abelcount;

namespace {

AbelianGroup grp(std::vector<i64> d) { return AbelianGroup::from_cyclic_orders(d); }
NormSubgroup sub(const char* gens) { return NormSubgroup(parse_rational_list(gens)); }

}  // namespace

static void BM_EnumerateQuadratic(benchmark::State& state) {
    const auto g = grp({2});
    for (auto _ : state) {
        i64 n = 0;
        for_each_character(g, 1, state.range(0), false, [&](const GChar&) { ++n; });
        benchmark::DoNotOptimize(n);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EnumerateQuadratic)->RangeMultiplier(10)->Range(10'000, 1'000'000)->Unit(benchmark::kMillisecond);

static void BM_CountFive(benchmark::State& state) {
    LocalConditions c(grp({2}), sub("5"));
    for (auto _ : state) benchmark::DoNotOptimize(count_with_conditions(c, {state.range(0)}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CountFive)->RangeMultiplier(10)->Range(10'000, 1'000'000)->Unit(benchmark::kMillisecond);

static void BM_CountBiquadraticShards(benchmark::State& state) {
    LocalConditions c(grp({2, 2}), sub("25"));
    const int shards = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(count_with_conditions(c, {20'000}, {.shards = shards}));
}
BENCHMARK(BM_CountBiquadraticShards)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_PoissonCheck(benchmark::State& state) {
    LocalConditions c(grp({4}), sub("-1"));
    for (auto _ : state) benchmark::DoNotOptimize(poisson_identity_check(c, state.range(0)));
}
BENCHMARK(BM_PoissonCheck)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_LeadingConstant(benchmark::State& state) {
    LocalConditions c(grp({8}), sub("16"));
    for (auto _ : state) benchmark::DoNotOptimize(leading_constant(c, state.range(0)));
}
BENCHMARK(BM_LeadingConstant)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_GlobalNormStatus(benchmark::State& state) {
    const auto chi = biquadratic_character(13, 17);
    const auto alpha = FactoredRational::from_integer(25);
    for (auto _ : state) benchmark::DoNotOptimize(global_norm_status(chi, alpha));
}
BENCHMARK(BM_GlobalNormStatus);

static void BM_Varpi(benchmark::State& state) {
    const auto g = grp({2, 4, 8});
    const auto a = sub("-1,2,3");
    for (auto _ : state) benchmark::DoNotOptimize(varpi(g, a));
}
BENCHMARK(BM_Varpi);

BENCHMARK_MAIN();
