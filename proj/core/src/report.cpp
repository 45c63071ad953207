#include "portalloc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <json.hpp>

#include "portalloc/errors.hpp"

namespace portalloc {

AllocationReport::AllocationReport(VariableMap layout, FormulationConfig config, std::vector<double> decisions,
                                   std::vector<double> z, double objective_value, double lp_objective)
    : layout_(std::move(layout)),
      config_(std::move(config)),
      values_(std::move(decisions)),
      z_(std::move(z)),
      objective_value_(objective_value),
      lp_objective_(lp_objective) {}

double AllocationReport::spot_volume(std::size_t s) const {
    const auto& d = dims();
    double total = 0.0;
    for (std::size_t m = 0; m < d.markets(); ++m) {
        for (std::size_t k = 0; k < d.steps[m]; ++k) {
            for (std::size_t t = 0; t < d.periods; ++t) total += y_spot(m, k, t, s);
        }
    }
    return total;
}

double AllocationReport::production_volume(std::size_t s) const {
    const auto& d = dims();
    double total = 0.0;
    for (std::size_t i = 0; i < d.supply_steps; ++i) {
        for (std::size_t t = 0; t < d.periods; ++t) total += u_prod(i, t, s);
    }
    return total;
}

namespace {

double dro_penalty_value(const FormulationConfig& config, const VariableMap& map, std::span<const double> x,
                         const ScenarioSet& scenarios) {
    const auto& dims = map.dims();
    const std::size_t M = dims.markets();
    const std::size_t groups = config.dro_penalty == DroPenalty::PerScenario ? 1 : dims.periods;
    double penalty = 0.0;
    for (std::size_t s = 0; s < dims.scenarios; ++s) {
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t t_begin = groups == 1 ? 0 : g;
            const std::size_t t_end = groups == 1 ? dims.periods : g + 1;
            Eigen::VectorXd aggregated = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(M));
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t t = t_begin; t < t_end; ++t) {
                    for (std::size_t k = 0; k < dims.steps[m]; ++k) {
                        aggregated[static_cast<Eigen::Index>(m)] += x[map.y(m, k, t, s)];
                    }
                }
            }
            penalty += scenarios.probability(s) * (config.q.transpose() * aggregated).lpNorm<1>();
        }
    }
    return config.epsilon * penalty;
}

}  // namespace

AllocationReport extract_report(const LpSolution& solution, const BuiltModel& model, const MarketInstance& instance,
                                const ScenarioSet& scenarios) {
    if (solution.status != LpStatus::Optimal) {
        throw SolveFailed("cannot extract a report from a " + std::string(to_string(solution.status)) + " solve");
    }
    const auto& map = model.map;
    if (solution.values.size() != map.num_columns()) {
        throw DimensionMismatch("solution size does not match the variable map");
    }
    const std::span<const double> x(solution.values);
    const auto& dims = map.dims();

    std::vector<double> z(dims.scenarios);
    double expected = 0.0;
    for (std::size_t s = 0; s < dims.scenarios; ++s) {
        z[s] = x[map.z(s)];
        const double recomputed = scenario_profit(instance, scenarios, map, x, s);
        if (std::abs(recomputed - z[s]) > kProfitConsistencyTolerance * std::max(1.0, std::abs(z[s]))) {
            throw ConsistencyError("scenario " + std::to_string(s) + ": solver profit " + std::to_string(z[s]) +
                                   " differs from recomputed " + std::to_string(recomputed));
        }
        expected += scenarios.probability(s) * z[s];
    }

    const auto& config = model.config;
    double objective = expected;
    switch (config.kind) {
        case ModelKind::RiskNeutral: break;
        case ModelKind::Cvar: {
            double shortfall = 0.0;
            for (std::size_t s = 0; s < dims.scenarios; ++s) shortfall += scenarios.probability(s) * x[map.ell(s)];
            objective = config.lambda * expected +
                        (1.0 - config.lambda) * (x[map.var()] - shortfall / config.alpha);
            break;
        }
        case ModelKind::Dro: objective = expected - dro_penalty_value(config, map, x, scenarios); break;
    }

    VariableMap layout(dims);
    std::vector<double> decisions(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(map.base_columns()));
    return AllocationReport(std::move(layout), config, std::move(decisions), std::move(z), objective,
                            solution.objective);
}

ReportAudit audit_report(const AllocationReport& report, const MarketInstance& instance,
                         const ScenarioSet& scenarios) {
    ReportAudit audit;
    const auto& d = report.dims();
    const auto& map = report.layout();
    const std::span<const double> x(report.decisions());
    const auto bound = [&](double v, double lo, double hi) {
        audit.bounds = std::max({audit.bounds, lo - v, v - hi});
    };

    for (std::size_t s = 0; s < d.scenarios; ++s) {
        const double z = report.z()[s];
        const double recomputed = scenario_profit(instance, scenarios, map, x, s);
        audit.profit = std::max(audit.profit, std::abs(z - recomputed) / std::max(1.0, std::abs(z)));
    }
    for (std::size_t m = 0; m < d.markets(); ++m) {
        for (std::size_t c = 0; c < d.contracts[m]; ++c) {
            const auto& contract = instance.markets[m].contracts[c];
            bound(report.x_min(m, c), 0.0, contract.max_volume);
            for (std::size_t t = 0; t < d.periods; ++t) {
                for (std::size_t s = 0; s < d.scenarios; ++s) {
                    const double xt = report.x_term(m, c, t, s);
                    bound(xt, 0.0, contract.max_volume);
                    audit.contract_window = std::max({audit.contract_window, report.x_min(m, c) - xt,
                                                      xt - report.x_min(m, c) - contract.flex_above_min});
                }
            }
        }
    }
    for (std::size_t t = 0; t < d.periods; ++t) {
        const auto& lim = instance.production_limits[t];
        for (std::size_t s = 0; s < d.scenarios; ++s) {
            double produced = 0.0;
            double delivered = 0.0;
            double transported = 0.0;
            for (std::size_t i = 0; i < d.supply_steps; ++i) {
                produced += report.u_prod(i, t, s);
                bound(report.u_prod(i, t, s), 0.0, instance.supply_steps[i].capacity);
            }
            for (std::size_t m = 0; m < d.markets(); ++m) {
                for (std::size_t c = 0; c < d.contracts[m]; ++c) delivered += report.x_term(m, c, t, s);
                for (std::size_t k = 0; k < d.steps[m]; ++k) {
                    delivered += report.y_spot(m, k, t, s);
                    bound(report.y_spot(m, k, t, s), 0.0, scenarios.width(m, k, t, s));
                }
                transported += report.u_trans(m, t, s);
                bound(report.u_trans(m, t, s), 0.0, lim.upper);
            }
            audit.supply_demand = std::max(audit.supply_demand, std::abs(produced - delivered));
            audit.supply_transport = std::max(audit.supply_transport, std::abs(produced - transported));
            audit.production = std::max({audit.production, lim.lower - produced, produced - lim.upper});
        }
    }
    audit.bounds = std::max(audit.bounds, 0.0);
    audit.contract_window = std::max(audit.contract_window, 0.0);
    audit.production = std::max(audit.production, 0.0);
    return audit;
}

std::string format_sig9(double value) {
    if (value == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

double round_sig9(double value) {
    if (!std::isfinite(value)) return value;
    const std::string text = format_sig9(value);
    return std::strtod(text.c_str(), nullptr);
}

std::string report_to_json(const AllocationReport& report, const MarketInstance& instance) {
    using nlohmann::json;
    const auto& d = report.dims();
    // Solver noise below 1e-9 is printed as 0.
    const auto r = [](double v) { return std::abs(v) < 1e-9 ? 0.0 : round_sig9(v); };

    json x_min = json::array();
    json x_term = json::array();
    json y_spot = json::array();
    json u_trans = json::array();
    for (std::size_t m = 0; m < d.markets(); ++m) {
        json xm = json::array();
        json xt = json::array();
        for (std::size_t c = 0; c < d.contracts[m]; ++c) {
            xm.push_back(r(report.x_min(m, c)));
            json per_t = json::array();
            for (std::size_t t = 0; t < d.periods; ++t) {
                json per_s = json::array();
                for (std::size_t s = 0; s < d.scenarios; ++s) per_s.push_back(r(report.x_term(m, c, t, s)));
                per_t.push_back(std::move(per_s));
            }
            xt.push_back(std::move(per_t));
        }
        x_min.push_back(std::move(xm));
        x_term.push_back(std::move(xt));

        json ys = json::array();
        for (std::size_t k = 0; k < d.steps[m]; ++k) {
            json per_t = json::array();
            for (std::size_t t = 0; t < d.periods; ++t) {
                json per_s = json::array();
                for (std::size_t s = 0; s < d.scenarios; ++s) per_s.push_back(r(report.y_spot(m, k, t, s)));
                per_t.push_back(std::move(per_s));
            }
            ys.push_back(std::move(per_t));
        }
        y_spot.push_back(std::move(ys));

        json ut = json::array();
        for (std::size_t t = 0; t < d.periods; ++t) {
            json per_s = json::array();
            for (std::size_t s = 0; s < d.scenarios; ++s) per_s.push_back(r(report.u_trans(m, t, s)));
            ut.push_back(std::move(per_s));
        }
        u_trans.push_back(std::move(ut));
    }
    json u_prod = json::array();
    for (std::size_t i = 0; i < d.supply_steps; ++i) {
        json per_t = json::array();
        for (std::size_t t = 0; t < d.periods; ++t) {
            json per_s = json::array();
            for (std::size_t s = 0; s < d.scenarios; ++s) per_s.push_back(r(report.u_prod(i, t, s)));
            per_t.push_back(std::move(per_s));
        }
        u_prod.push_back(std::move(per_t));
    }
    json z = json::array();
    for (double v : report.z()) z.push_back(r(v));

    const auto& config = report.config();
    json model{{"kind", std::string(to_string(config.kind))}};
    if (config.kind == ModelKind::Cvar) {
        model["alpha"] = config.alpha;
        model["lambda"] = config.lambda;
    } else if (config.kind == ModelKind::Dro) {
        model["epsilon"] = config.epsilon;
        model["dro_penalty"] = std::string(to_string(config.dro_penalty));
    }

    json doc;
    doc["model"] = std::move(model);
    doc["markets"] = instance.market_ids();
    doc["objective_value"] = r(report.objective_value());
    doc["x_min"] = std::move(x_min);
    doc["x_term"] = std::move(x_term);
    doc["y_spot"] = std::move(y_spot);
    doc["u_prod"] = std::move(u_prod);
    doc["u_trans"] = std::move(u_trans);
    doc["z"] = std::move(z);
    return doc.dump(2) + "\n";
}

}  // namespace portalloc
