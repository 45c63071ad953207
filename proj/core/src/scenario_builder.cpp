#include "portalloc/scenario_builder.hpp"

#include <numeric>

#include "portalloc/errors.hpp"

namespace portalloc {

ElasticityRule default_elasticity(const MarketInstance& instance) {
    double width = 0.0;
    for (const auto& lim : instance.production_limits) width = std::max(width, lim.upper);
    if (!(width > 0.0)) width = instance.total_supply_capacity();
    return {1, width, 0.0};
}

ScenarioSet build_scenarios(const MarketInstance& instance, const Eigen::MatrixXd& top_prices,
                            std::span<const std::size_t> cluster_sizes) {
    const auto markets = instance.num_markets();
    const auto count = static_cast<std::size_t>(top_prices.rows());
    if (static_cast<std::size_t>(top_prices.cols()) != markets) {
        throw DimensionMismatch("representatives have " + std::to_string(top_prices.cols()) +
                                " price columns for " + std::to_string(markets) + " markets");
    }
    if (cluster_sizes.size() != count) throw DimensionMismatch("one cluster size per representative required");
    if (count == 0) throw InvalidInput("no representatives to build scenarios from");
    const auto total = std::accumulate(cluster_sizes.begin(), cluster_sizes.end(), std::size_t{0});
    if (total == 0) throw InvalidInput("cluster sizes sum to zero");

    std::vector<ElasticityRule> rules;
    std::vector<std::size_t> steps;
    for (const auto& market : instance.markets) {
        rules.push_back(market.elasticity.value_or(default_elasticity(instance)));
        steps.push_back(rules.back().steps);
    }
    std::vector<double> probabilities;
    for (const auto size : cluster_sizes) probabilities.push_back(static_cast<double>(size) / static_cast<double>(total));

    ScenarioSet set(std::move(probabilities), instance.periods, std::move(steps));
    for (std::size_t s = 0; s < count; ++s) {
        for (std::size_t m = 0; m < markets; ++m) {
            const double top = top_prices(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(m));
            const auto& rule = rules[m];
            for (std::size_t t = 0; t < instance.periods; ++t) {
                for (std::size_t k = 0; k < rule.steps; ++k) {
                    set.set_step(m, k, t, s, top - static_cast<double>(k) * rule.decrement, rule.width);
                }
            }
        }
    }
    return set;
}

ScenarioSet build_scenarios(const MarketInstance& instance, const PriceHistory& history,
                            const KMeansResult& reduction) {
    Eigen::MatrixXd top(static_cast<Eigen::Index>(reduction.k()), history.nodal_prices.cols());
    for (std::size_t s = 0; s < reduction.k(); ++s) {
        top.row(static_cast<Eigen::Index>(s)) = history.nodal_prices.row(static_cast<Eigen::Index>(reduction.representatives[s]));
    }
    return build_scenarios(instance, top, reduction.cluster_sizes);
}

}  // namespace portalloc
