#include "portalloc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <variant>

#include "portalloc/errors.hpp"

namespace portalloc {
namespace {

struct GridPoint {
    ModelKind label;      // source reported in the rows
    double parameter;     // alpha or epsilon, unused for the anchor
    FormulationConfig config;
};

using Outcome = std::variant<std::monostate, AllocationReport, std::string>;

}  // namespace

SweepResult sweep(const MarketInstance& instance, const ScenarioSet& scenarios, const SweepSpec& spec) {
    if (spec.alpha_grid.empty() && spec.epsilon_grid.empty()) {
        throw InvalidInput("sweep needs a non-empty alpha or epsilon grid");
    }
    if (spec.gammas.empty()) throw InvalidInput("sweep needs at least one gamma");
    for (double gamma : spec.gammas) {
        if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterOutOfRange("gamma must lie strictly inside (0,1)");
    }

    SweepResult result;
    result.zeta_riskfree = risk_free_profit(instance, scenarios, spec.simplex);

    std::vector<GridPoint> points;
    points.push_back({ModelKind::RiskNeutral, 0.0, FormulationConfig::risk_neutral()});
    for (double alpha : spec.alpha_grid) {
        points.push_back({ModelKind::Cvar, alpha, FormulationConfig::cvar(alpha, spec.lambda)});
    }
    for (double epsilon : spec.epsilon_grid) {
        points.push_back({ModelKind::Dro, epsilon, FormulationConfig::dro(epsilon, spec.q, spec.dro_penalty)});
    }

    std::vector<Outcome> outcomes(points.size());
    const auto run_point = [&](std::size_t i) {
        try {
            outcomes[i] = solve_allocation(instance, scenarios, points[i].config, spec.simplex);
        } catch (const Error& e) {
            outcomes[i] = std::string(e.what());
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(spec.threads, 1, points.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < points.size(); i = next++) run_point(i);
            });
        }
    }

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& point = points[i];
        if (const auto* error = std::get_if<std::string>(&outcomes[i])) {
            result.failures.push_back({point.label, point.parameter, *error});
            continue;
        }
        const auto& report = std::get<AllocationReport>(outcomes[i]);
        for (double gamma : spec.gammas) {
            auto row = metric_row(report, scenarios, gamma, result.zeta_riskfree);
            row.source = point.label;
            if (point.label == ModelKind::Cvar) {
                row.alpha = point.parameter;
                row.lambda = spec.lambda;
            }
            result.rows.push_back(std::move(row));
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const MetricRow& a, const MetricRow& b) { return a.spot_fraction < b.spot_fraction; });
    return result;
}

}  // namespace portalloc
