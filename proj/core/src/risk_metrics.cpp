#include "portalloc/risk_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "portalloc/errors.hpp"
#include "portalloc/formulations.hpp"

namespace portalloc {

double empirical_cvar(std::span<const double> profits, std::span<const double> probabilities, double gamma) {
    if (profits.size() != probabilities.size()) throw DimensionMismatch("profits and probabilities differ in length");
    if (profits.empty()) throw InvalidInput("empirical_cvar needs at least one scenario");
    if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterOutOfRange("gamma must lie strictly inside (0,1)");

    std::vector<std::size_t> order(profits.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return profits[a] < profits[b]; });

    const double tail = 1.0 - gamma;
    double mass = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < order.size() && mass < tail;) {
        // Merge equal profit values into one atom.
        const double value = profits[order[i]];
        double atom = 0.0;
        while (i < order.size() && profits[order[i]] == value) atom += probabilities[order[i++]];
        const double take = std::min(atom, tail - mass);
        total += take * value;
        mass += take;
    }
    // Probabilities summing slightly below 1 can leave the tail short; the
    // largest profit absorbs the remainder.
    if (mass < tail) total += (tail - mass) * profits[order.back()];
    return total / tail;
}

AllocationReport solve_allocation(const MarketInstance& instance, const ScenarioSet& scenarios,
                                  const FormulationConfig& config, const SimplexOptions& options) {
    const auto model = build_model(instance, scenarios, config);
    const auto solution = solve(model.lp, options);
    if (solution.status != LpStatus::Optimal) {
        throw SolveFailed(std::string(to_string(config.kind)) + " model is " + std::string(to_string(solution.status)));
    }
    return extract_report(solution, model, instance, scenarios);
}

double risk_free_profit(const MarketInstance& instance, const ScenarioSet& scenarios, const SimplexOptions& options) {
    BuildOptions build;
    build.zero_spot = true;
    const auto model = build_risk_neutral(instance, scenarios, build);
    const auto solution = solve(model.lp, options);
    if (solution.status != LpStatus::Optimal) {
        throw SolveFailed("risk-free allocation is " + std::string(to_string(solution.status)) +
                          ": contracts cannot absorb the minimum production");
    }
    return extract_report(solution, model, instance, scenarios).objective_value();
}

double spot_fraction(const AllocationReport& report, const ScenarioSet& scenarios) {
    double spot = 0.0;
    double produced = 0.0;
    for (std::size_t s = 0; s < report.dims().scenarios; ++s) {
        spot += scenarios.probability(s) * report.spot_volume(s);
        produced += scenarios.probability(s) * report.production_volume(s);
    }
    return produced > 0.0 ? std::clamp(spot / produced, 0.0, 1.0) : 0.0;
}

MetricRow metric_row(const AllocationReport& report, const ScenarioSet& scenarios, double gamma,
                     double zeta_riskfree) {
    MetricRow row;
    const auto& config = report.config();
    row.source = config.kind;
    if (config.kind == ModelKind::Cvar) {
        row.alpha = config.alpha;
        row.lambda = config.lambda;
    } else if (config.kind == ModelKind::Dro) {
        row.epsilon = config.epsilon;
    }
    row.gamma = gamma;
    row.spot_fraction = spot_fraction(report, scenarios);

    const auto& z = report.z();
    const auto& p = scenarios.probabilities();
    row.zeta = std::inner_product(z.begin(), z.end(), p.begin(), 0.0);
    row.chi = empirical_cvar(z, p, gamma);
    row.zeta_riskfree = zeta_riskfree;
    row.delta_zeta = row.zeta - zeta_riskfree;
    row.delta_chi = std::abs(row.chi - zeta_riskfree);
    if (row.delta_chi >= 1e-9 * std::max(1.0, std::abs(zeta_riskfree))) row.rho = row.delta_zeta / row.delta_chi;
    return row;
}

MetricRow metric_row(const AllocationReport& report, const MarketInstance& instance, const ScenarioSet& scenarios,
                     double gamma) {
    return metric_row(report, scenarios, gamma, risk_free_profit(instance, scenarios));
}

namespace {
std::string cell(const std::optional<double>& v) { return v ? format_sig9(*v) : std::string(); }
}  // namespace

std::string tradeoff_csv(std::span<const MetricRow> rows) {
    std::string out = kTradeoffCsvHeader;
    out += '\n';
    for (const auto& row : rows) {
        out += to_string(row.source);
        for (const auto& v : {cell(row.alpha), cell(row.lambda), cell(row.epsilon), format_sig9(row.gamma),
                              format_sig9(row.spot_fraction), format_sig9(row.zeta), format_sig9(row.chi),
                              format_sig9(row.zeta_riskfree), format_sig9(row.delta_zeta),
                              format_sig9(row.delta_chi), cell(row.rho)}) {
            out += ',';
            out += v;
        }
        out += '\n';
    }
    return out;
}

}  // namespace portalloc
