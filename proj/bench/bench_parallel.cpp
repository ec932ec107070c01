#include <benchmark/benchmark.h>

#include "pskm/cluster.hpp"
#include "pskm/pipeline.hpp"
#include "pskm/simgen.hpp"

namespace {

pskm::SeriesTable make_table(int n_series_per_class) {
    pskm::SimConfig config;
    config.scenario = pskm::NoiseScenario::Ar05;
    config.class_sizes.fill(n_series_per_class);
    config.seed = 17;
    return pskm::to_table(pskm::generate_dataset(config));
}

pskm::SmoothOptions smooth_options() {
    pskm::SmoothOptions opts;
    opts.n_segments = 10;
    opts.degree = 3;
    opts.penalty_order = 3;
    opts.lambdas = pskm::lambda_grid(1e-2, 1e8, 50);
    return opts;
}

void BM_SmoothBatchParallel(benchmark::State& state) {
    const auto table = make_table(static_cast<int>(state.range(0)));
    const auto opts = smooth_options();
    for (auto _ : state) benchmark::DoNotOptimize(pskm::smooth_batch(table, opts));
}

void BM_SmoothBatchSerial(benchmark::State& state) {
    const auto table = make_table(static_cast<int>(state.range(0)));
    const auto opts = smooth_options();
    for (auto _ : state) benchmark::DoNotOptimize(pskm::smooth_batch_ref(table, opts));
}

pskm::CoefficientMatrix make_coefficients(int n_series_per_class) {
    const auto table = make_table(n_series_per_class);
    const auto result = pskm::smooth_batch(table, smooth_options());
    return pskm::coefficient_matrix(table, result);
}

void BM_KMeansParallel(benchmark::State& state) {
    const auto coef = make_coefficients(static_cast<int>(state.range(0)));
    pskm::KMeansOptions opts;
    opts.k = 6;
    opts.distance = pskm::Distance::Pearson;
    opts.restarts = 50;
    opts.seed = 5;
    for (auto _ : state) benchmark::DoNotOptimize(pskm::kmeans(coef, opts));
}

void BM_KMeansSerial(benchmark::State& state) {
    const auto coef = make_coefficients(static_cast<int>(state.range(0)));
    pskm::KMeansOptions opts;
    opts.k = 6;
    opts.distance = pskm::Distance::Pearson;
    opts.restarts = 50;
    opts.seed = 5;
    for (auto _ : state) benchmark::DoNotOptimize(pskm::kmeans_ref(coef, opts));
}

BENCHMARK(BM_SmoothBatchParallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SmoothBatchSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMeansParallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KMeansSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
