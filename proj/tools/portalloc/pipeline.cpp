#include "portalloc/pipeline.hpp"

#include <json.hpp>

#include "portalloc/errors.hpp"
#include "portalloc/report.hpp"
#include "portalloc/scenario_builder.hpp"
#include "portalloc/validate.hpp"

namespace portalloc::cli {

PreparedScenarios prepare_scenarios(const MarketInstance& instance, const PipelineSpec& spec) {
    IngestOptions ingest;
    if (spec.columns == "pjm") {
        ingest.columns = ColumnMap::pjm_rt_hourly();
    } else if (!spec.columns.empty()) {
        ingest.columns = ColumnMap::parse(spec.columns);
    }
    ingest.system_node = spec.system_node;
    const auto ids = instance.market_ids();

    PreparedScenarios p;
    p.history = ingest_lmp_csv(spec.raw_csv, ingest).select(ids);
    const auto n = p.history.observations();
    const KMeansOptions km{spec.seed, 300};

    std::size_t k = 0;
    if (spec.k) {
        k = *spec.k;
    } else {
        const auto k_max = std::min(spec.k_max, n);
        if (k_max < 3) throw InvalidInput("automatic k needs at least 3 candidate values of k");
        p.curve = inertia_curve(p.history.nodal_prices, 1, k_max, km);
        p.knee = knee_point(p.curve);
        k = p.knee->k;
    }
    p.reduction = kmeans_reduce(p.history, k, km);
    p.q = estimate_q(p.history);
    p.scenarios = build_scenarios(instance, p.history, p.reduction);

    const auto violations = validate_instance(instance, p.scenarios);
    if (!violations.empty()) {
        throw InvalidInput("reduced scenario set is invalid: " + violations.front().message);
    }
    return p;
}

std::string prep_summary_json(const PreparedScenarios& p, const PipelineSpec& spec) {
    nlohmann::ordered_json doc;
    doc["seed"] = spec.seed;
    doc["observations"] = p.history.observations();
    doc["markets"] = p.history.nodes;
    doc["system_price"] = p.history.has_system_price ? "node:" + spec.system_node : "absent (treated as 0)";
    doc["k_mode"] = spec.k ? "fixed" : "auto";
    doc["k"] = p.reduction.k();
    if (p.knee) doc["knee_degenerate"] = p.knee->degenerate;
    auto curve = nlohmann::ordered_json::array();
    for (const auto& pt : p.curve) curve.push_back({{"k", pt.k}, {"inertia", round_sig9(pt.inertia)}});
    doc["inertia_curve"] = std::move(curve);
    doc["inertia"] = round_sig9(p.reduction.inertia);
    doc["kmeans_iterations"] = p.reduction.iterations;
    doc["kmeans_converged"] = p.reduction.converged;
    doc["empty_cluster_reseeds"] = p.reduction.reseeds;
    auto reps = nlohmann::ordered_json::array();
    for (std::size_t s = 0; s < p.reduction.k(); ++s) {
        reps.push_back({{"scenario", s},
                        {"timestamp", p.history.timestamps[p.reduction.representatives[s]]},
                        {"cluster_size", p.reduction.cluster_sizes[s]}});
    }
    doc["representatives"] = std::move(reps);
    doc["q_jitter"] = p.q.jitter;
    doc["q_residual"] = p.q.residual;
    if (p.q.jitter > 0.0) {
        doc["warnings"] = {"covariance not positive definite; added " + format_sig9(p.q.jitter) +
                           " * I before Cholesky"};
    }
    return doc.dump(2) + "\n";
}

}  // namespace portalloc::cli
