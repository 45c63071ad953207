#include <benchmark/benchmark.h>

#include <random>

#include "portalloc/kmeans.hpp"
#include "portalloc/knee_point.hpp"

using namespace portalloc;

namespace {

Eigen::MatrixXd hourly_prices(Eigen::Index hours, Eigen::Index nodes) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> noise(0.0, 4.0);
    Eigen::MatrixXd x(hours, nodes);
    for (Eigen::Index i = 0; i < hours; ++i) {
        const double level = 25.0 + 15.0 * static_cast<double>(i % 3);
        for (Eigen::Index j = 0; j < nodes; ++j) x(i, j) = level + noise(rng);
    }
    return x;
}

void BM_KMeans(benchmark::State& state) {
    const auto x = hourly_prices(state.range(0), 10);
    for (auto _ : state) benchmark::DoNotOptimize(kmeans_reduce(x, static_cast<std::size_t>(state.range(1))));
}
BENCHMARK(BM_KMeans)->Args({720, 5})->Args({8760, 10})->Unit(benchmark::kMillisecond);

void BM_KneeSelection(benchmark::State& state) {
    const auto x = hourly_prices(state.range(0), 10);
    for (auto _ : state) {
        const auto curve = inertia_curve(x, 1, 20);
        benchmark::DoNotOptimize(knee_point(curve));
    }
}
BENCHMARK(BM_KneeSelection)->Arg(720)->Unit(benchmark::kMillisecond);

}  // namespace
