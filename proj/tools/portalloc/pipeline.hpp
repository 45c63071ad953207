#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "portalloc/domain.hpp"
#include "portalloc/kmeans.hpp"
#include "portalloc/knee_point.hpp"
#include "portalloc/lmp_csv.hpp"
#include "portalloc/q_estimate.hpp"

namespace portalloc::cli {

struct PipelineSpec {
    std::string raw_csv;
    std::string columns;               ///< `timestamp=..,node=..,price=..` or `pjm`; empty = defaults
    std::string system_node = "SYSTEM";
    std::optional<std::size_t> k;      ///< empty = knee point over [1, k_max]
    std::size_t k_max = 20;
    std::uint64_t seed = 0;
};

struct PreparedScenarios {
    PriceHistory history;              ///< restricted to the instance markets
    KMeansResult reduction;
    std::vector<InertiaPoint> curve;   ///< empty unless k was chosen automatically
    std::optional<KneeResult> knee;
    QEstimate q;
    ScenarioSet scenarios;
};

/// ingest -> (knee k) -> k-means -> Q estimate -> scenario set for `instance`.
PreparedScenarios prepare_scenarios(const MarketInstance& instance, const PipelineSpec& spec);

/// Deterministic summary document of a preparation run.
std::string prep_summary_json(const PreparedScenarios& prepared, const PipelineSpec& spec);

}  // namespace portalloc::cli
