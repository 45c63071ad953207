#include "portalloc/formulations.hpp"

#include <cmath>
#include <string>

#include "portalloc/errors.hpp"
#include "portalloc/validate.hpp"

namespace portalloc {
namespace {

std::string idx(std::initializer_list<std::size_t> coords) {
    std::string out = "[";
    bool first = true;
    for (auto c : coords) {
        if (!first) out += ',';
        out += std::to_string(c);
        first = false;
    }
    return out + "]";
}

void require_valid(const MarketInstance& instance, const ScenarioSet& scenarios) {
    const auto violations = validate_instance(instance, scenarios);
    if (!violations.empty()) {
        std::string msg = "invalid instance/scenarios: " + violations.front().message;
        if (violations.size() > 1) msg += " (+" + std::to_string(violations.size() - 1) + " more)";
        throw InvalidInput(msg);
    }
    const double capacity = instance.total_supply_capacity();
    for (std::size_t t = 0; t < instance.periods; ++t) {
        if (capacity < instance.production_limits[t].lower) {
            throw InfeasibleStructure("total supply capacity " + std::to_string(capacity) + " is below L_t=" +
                                      std::to_string(instance.production_limits[t].lower) + " at t=" +
                                      std::to_string(t));
        }
    }
}

// Shared decision block; objective coefficients are left at zero except the
// spot tie-break.
BuiltModel build_base(const MarketInstance& instance, const ScenarioSet& scenarios, const BuildOptions& options) {
    require_valid(instance, scenarios);

    BuiltModel model;
    model.map = VariableMap(ModelDimensions::of(instance, scenarios));
    model.tie_break_weight = options.tie_break_weight;
    const auto& dims = model.map.dims();
    const std::size_t M = dims.markets();
    const std::size_t I = dims.supply_steps;
    const std::size_t T = dims.periods;
    const std::size_t S = dims.scenarios;
    auto& lp = model.lp;

    // Columns, in VariableMap order.
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t c = 0; c < dims.contracts[m]; ++c) {
            lp.add_column("xmin" + idx({m, c}), 0.0, instance.markets[m].contracts[c].max_volume);
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t c = 0; c < dims.contracts[m]; ++c) {
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t s = 0; s < S; ++s) {
                    lp.add_column("xterm" + idx({m, c, t, s}), 0.0, instance.markets[m].contracts[c].max_volume);
                }
            }
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t k = 0; k < dims.steps[m]; ++k) {
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t s = 0; s < S; ++s) {
                    const double upper = options.zero_spot ? 0.0 : scenarios.width(m, k, t, s);
                    lp.add_column("y" + idx({m, k, t, s}), 0.0, upper, -options.tie_break_weight);
                }
            }
        }
    }
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t s = 0; s < S; ++s) {
                lp.add_column("uprod" + idx({i, t, s}), 0.0, instance.supply_steps[i].capacity);
            }
        }
    }
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t s = 0; s < S; ++s) {
                lp.add_column("utrans" + idx({m, t, s}), 0.0, instance.production_limits[t].upper);
            }
        }
    }
    for (std::size_t s = 0; s < S; ++s) lp.add_column("z" + idx({s}), -kInfinity, kInfinity);

    const auto& map = model.map;

    // Profit definition: z_s - revenue + cost = 0.
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<Term> terms{{map.z(s), 1.0}};
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t c = 0; c < dims.contracts[m]; ++c) {
                    terms.push_back({map.xterm(m, c, t, s), -instance.markets[m].contracts[c].wholesale_price[t]});
                }
                for (std::size_t k = 0; k < dims.steps[m]; ++k) {
                    terms.push_back({map.y(m, k, t, s), -scenarios.price(m, k, t, s)});
                }
                terms.push_back({map.utrans(m, t, s), instance.markets[m].transport_cost});
            }
            for (std::size_t i = 0; i < I; ++i) {
                terms.push_back({map.uprod(i, t, s), instance.supply_steps[i].unit_cost});
            }
        }
        lp.add_row("profit" + idx({s}), std::move(terms), Relation::Equal, 0.0);
    }

    // Contract windows x_min <= x_term <= x_min + X^+.
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t c = 0; c < dims.contracts[m]; ++c) {
            const double flex = instance.markets[m].contracts[c].flex_above_min;
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t s = 0; s < S; ++s) {
                    std::vector<Term> terms{{map.xterm(m, c, t, s), 1.0}, {map.xmin(m, c), -1.0}};
                    if (flex == 0.0) {
                        lp.add_row("window" + idx({m, c, t, s}), std::move(terms), Relation::Equal, 0.0);
                    } else {
                        lp.add_row("window_lo" + idx({m, c, t, s}), terms, Relation::GreaterEqual, 0.0);
                        lp.add_row("window_hi" + idx({m, c, t, s}), std::move(terms), Relation::LessEqual, flex);
                    }
                }
            }
        }
    }

    // Supply-demand balance and supply-transport balance.
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t s = 0; s < S; ++s) {
            std::vector<Term> terms;
            for (std::size_t i = 0; i < I; ++i) terms.push_back({map.uprod(i, t, s), 1.0});
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t c = 0; c < dims.contracts[m]; ++c) terms.push_back({map.xterm(m, c, t, s), -1.0});
                for (std::size_t k = 0; k < dims.steps[m]; ++k) terms.push_back({map.y(m, k, t, s), -1.0});
            }
            lp.add_row("supply_demand" + idx({t, s}), std::move(terms), Relation::Equal, 0.0);
        }
    }
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t s = 0; s < S; ++s) {
            std::vector<Term> terms;
            for (std::size_t i = 0; i < I; ++i) terms.push_back({map.uprod(i, t, s), 1.0});
            for (std::size_t m = 0; m < M; ++m) terms.push_back({map.utrans(m, t, s), -1.0});
            lp.add_row("supply_transport" + idx({t, s}), std::move(terms), Relation::Equal, 0.0);
        }
    }

    // Production limits, only where the bounds of uprod do not imply them.
    const double capacity = instance.total_supply_capacity();
    for (std::size_t t = 0; t < T; ++t) {
        const auto [lower, upper] = instance.production_limits[t];
        for (std::size_t s = 0; s < S; ++s) {
            std::vector<Term> terms;
            for (std::size_t i = 0; i < I; ++i) terms.push_back({map.uprod(i, t, s), 1.0});
            if (lower == upper) {
                lp.add_row("production" + idx({t, s}), std::move(terms), Relation::Equal, lower);
                continue;
            }
            if (lower > 0.0) lp.add_row("production_lo" + idx({t, s}), terms, Relation::GreaterEqual, lower);
            if (upper < capacity) lp.add_row("production_hi" + idx({t, s}), std::move(terms), Relation::LessEqual, upper);
        }
    }

    if (options.side_constraints) options.side_constraints(lp, map);
    return model;
}

}  // namespace

BuiltModel build_risk_neutral(const MarketInstance& instance, const ScenarioSet& scenarios,
                              const BuildOptions& options) {
    auto model = build_base(instance, scenarios, options);
    model.config = FormulationConfig::risk_neutral();
    for (std::size_t s = 0; s < model.map.dims().scenarios; ++s) {
        model.lp.set_objective(model.map.z(s), scenarios.probability(s));
    }
    return model;
}

BuiltModel build_cvar(const MarketInstance& instance, const ScenarioSet& scenarios, double alpha, double lambda,
                      const BuildOptions& options) {
    auto config = FormulationConfig::cvar(alpha, lambda);
    config.check();

    auto model = build_base(instance, scenarios, options);
    model.config = config;
    auto& lp = model.lp;
    auto& map = model.map;
    const std::size_t S = map.dims().scenarios;

    map.add_cvar_block();
    lp.add_column("var", -kInfinity, kInfinity, 1.0 - lambda);
    for (std::size_t s = 0; s < S; ++s) {
        lp.add_column("ell" + idx({s}), 0.0, kInfinity, -(1.0 - lambda) * scenarios.probability(s) / alpha);
    }
    for (std::size_t s = 0; s < S; ++s) {
        lp.set_objective(map.z(s), lambda * scenarios.probability(s));
        // ell_s >= var - z_s
        lp.add_row("cvar" + idx({s}), {{map.ell(s), 1.0}, {map.var(), -1.0}, {map.z(s), 1.0}},
                   Relation::GreaterEqual, 0.0);
    }
    return model;
}

BuiltModel build_dro(const MarketInstance& instance, const ScenarioSet& scenarios, double epsilon,
                     const Eigen::MatrixXd& q, DroPenalty mode, const BuildOptions& options) {
    const auto M = static_cast<Eigen::Index>(instance.num_markets());
    if (q.rows() != M || q.cols() != M) {
        throw DimensionMismatch("Q must be " + std::to_string(M) + "x" + std::to_string(M) + ", got " +
                                std::to_string(q.rows()) + "x" + std::to_string(q.cols()));
    }
    auto config = FormulationConfig::dro(epsilon, q, mode);
    config.check();

    auto model = build_base(instance, scenarios, options);
    model.config = config;
    auto& lp = model.lp;
    auto& map = model.map;
    const auto& dims = map.dims();
    const std::size_t S = dims.scenarios;
    const std::size_t T = dims.periods;
    const std::size_t groups = mode == DroPenalty::PerScenario ? 1 : T;

    for (std::size_t s = 0; s < S; ++s) lp.set_objective(map.z(s), scenarios.probability(s));

    map.add_dro_block(groups);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t g = 0; g < groups; ++g) {
            for (std::size_t j = 0; j < dims.markets(); ++j) {
                lp.add_column("w" + idx({s, g, j}), 0.0, kInfinity, -epsilon * scenarios.probability(s));
            }
        }
    }

    // w_{s,g,j} >= +-(Q' y_{s,g})_j = +-sum_m Q(m,j) * sum_{t in g} sum_k y[m,k,t,s]
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t g = 0; g < groups; ++g) {
            const std::size_t t_begin = mode == DroPenalty::PerScenario ? 0 : g;
            const std::size_t t_end = mode == DroPenalty::PerScenario ? T : g + 1;
            for (std::size_t j = 0; j < dims.markets(); ++j) {
                std::vector<Term> qy;
                for (std::size_t m = 0; m < dims.markets(); ++m) {
                    const double coef = q(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j));
                    if (coef == 0.0) continue;
                    for (std::size_t t = t_begin; t < t_end; ++t) {
                        for (std::size_t k = 0; k < dims.steps[m]; ++k) qy.push_back({map.y(m, k, t, s), coef});
                    }
                }
                std::vector<Term> pos{{map.w(s, g, j), 1.0}};
                std::vector<Term> neg{{map.w(s, g, j), 1.0}};
                for (const auto& term : qy) {
                    pos.push_back({term.column, -term.value});
                    neg.push_back(term);
                }
                lp.add_row("dro_pos" + idx({s, g, j}), std::move(pos), Relation::GreaterEqual, 0.0);
                lp.add_row("dro_neg" + idx({s, g, j}), std::move(neg), Relation::GreaterEqual, 0.0);
            }
        }
    }
    return model;
}

BuiltModel build_model(const MarketInstance& instance, const ScenarioSet& scenarios,
                       const FormulationConfig& config, const BuildOptions& options) {
    switch (config.kind) {
        case ModelKind::RiskNeutral: return build_risk_neutral(instance, scenarios, options);
        case ModelKind::Cvar: return build_cvar(instance, scenarios, config.alpha, config.lambda, options);
        case ModelKind::Dro: return build_dro(instance, scenarios, config.epsilon, config.q, config.dro_penalty, options);
    }
    throw InvalidInput("unknown model kind");
}

double scenario_profit(const MarketInstance& instance, const ScenarioSet& scenarios, const VariableMap& map,
                       std::span<const double> x, std::size_t s) {
    const auto& dims = map.dims();
    double profit = 0.0;
    for (std::size_t t = 0; t < dims.periods; ++t) {
        for (std::size_t m = 0; m < dims.markets(); ++m) {
            const auto& market = instance.markets[m];
            for (std::size_t c = 0; c < dims.contracts[m]; ++c) {
                profit += market.contracts[c].wholesale_price[t] * x[map.xterm(m, c, t, s)];
            }
            for (std::size_t k = 0; k < dims.steps[m]; ++k) {
                profit += scenarios.price(m, k, t, s) * x[map.y(m, k, t, s)];
            }
            profit -= market.transport_cost * x[map.utrans(m, t, s)];
        }
        for (std::size_t i = 0; i < dims.supply_steps; ++i) {
            profit -= instance.supply_steps[i].unit_cost * x[map.uprod(i, t, s)];
        }
    }
    return profit;
}

}  // namespace portalloc
