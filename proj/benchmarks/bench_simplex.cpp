#include <benchmark/benchmark.h>

#include <random>

#include "portalloc/domain.hpp"
#include "portalloc/risk_metrics.hpp"

using namespace portalloc;

namespace {

// M markets, 3 contracts each, 3 spot steps, T periods, S scenarios.
struct Case {
    MarketInstance instance;
    ScenarioSet scenarios;
};

Case make_case(std::size_t markets, std::size_t periods, std::size_t scenarios) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> price(20.0, 60.0);
    Case c;
    for (std::size_t m = 0; m < markets; ++m) {
        Market market;
        market.id = "M" + std::to_string(m);
        market.transport_cost = 1.0;
        for (double w : {38.0, 36.0, 34.0}) market.contracts.push_back({std::vector<double>(periods, w), 20.0, 5.0});
        c.instance.markets.push_back(market);
    }
    c.instance.supply_steps = {{60.0 * static_cast<double>(markets), 5.0}, {40.0 * static_cast<double>(markets), 15.0}};
    c.instance.production_limits.assign(periods, {20.0 * static_cast<double>(markets), 90.0 * static_cast<double>(markets)});
    c.instance.periods = periods;
    c.scenarios = ScenarioSet(std::vector<double>(scenarios, 1.0 / static_cast<double>(scenarios)), periods,
                              std::vector<std::size_t>(markets, 3));
    for (std::size_t m = 0; m < markets; ++m)
        for (std::size_t t = 0; t < periods; ++t)
            for (std::size_t s = 0; s < scenarios; ++s) {
                const double top = price(rng);
                for (std::size_t k = 0; k < 3; ++k) c.scenarios.set_step(m, k, t, s, top - 2.0 * static_cast<double>(k), 30.0);
            }
    return c;
}

void BM_RiskNeutral(benchmark::State& state) {
    const auto c = make_case(static_cast<std::size_t>(state.range(0)), 2, static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_allocation(c.instance, c.scenarios, FormulationConfig::risk_neutral()));
    }
}
BENCHMARK(BM_RiskNeutral)->Args({2, 5})->Args({3, 10})->Args({5, 10})->Unit(benchmark::kMillisecond);

void BM_Cvar(benchmark::State& state) {
    const auto c = make_case(3, 2, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_allocation(c.instance, c.scenarios, FormulationConfig::cvar(0.9, 0.1)));
    }
}
BENCHMARK(BM_Cvar)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Dro(benchmark::State& state) {
    const auto c = make_case(3, 2, static_cast<std::size_t>(state.range(0)));
    const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(3, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_allocation(c.instance, c.scenarios, FormulationConfig::dro(1.0, q)));
    }
}
BENCHMARK(BM_Dro)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
