#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "portalloc/domain.hpp"
#include "portalloc/kmeans.hpp"
#include "portalloc/lmp_csv.hpp"

namespace portalloc {

/// Rule used for a market without one: a single step as wide as the largest
/// production upper limit, so spot can always absorb the whole output.
ElasticityRule default_elasticity(const MarketInstance& instance);

/// Expands representative price rows into spot staircases.
/// `top_prices` is scenarios x markets in instance order; row s gives the top
/// step price of every period. Step k pays top - k*decrement with the rule's
/// width. Probabilities are cluster_sizes[s] / sum(cluster_sizes).
ScenarioSet build_scenarios(const MarketInstance& instance, const Eigen::MatrixXd& top_prices,
                            std::span<const std::size_t> cluster_sizes);

/// Reduction of `history` (columns already in instance market order).
ScenarioSet build_scenarios(const MarketInstance& instance, const PriceHistory& history,
                            const KMeansResult& reduction);

}  // namespace portalloc
