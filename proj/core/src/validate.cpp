#include "portalloc/validate.hpp"

#include <cmath>
#include <sstream>

namespace portalloc {
namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

void push(std::vector<Violation>& out, std::string code, std::string message) {
    out.push_back({std::move(code), std::move(message)});
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

std::vector<Violation> validate_instance(const MarketInstance& instance) {
    std::vector<Violation> out;
    if (instance.markets.empty()) push(out, "no_markets", "instance has no markets");
    if (instance.supply_steps.empty()) push(out, "no_supply_steps", "instance has no supply steps");
    if (instance.periods == 0) push(out, "no_periods", "instance has zero periods");
    if (instance.production_limits.size() != instance.periods) {
        push(out, "production_limits_size",
             "production_limits has " + std::to_string(instance.production_limits.size()) +
                 " entries, expected " + std::to_string(instance.periods));
    }

    for (std::size_t m = 0; m < instance.markets.size(); ++m) {
        const auto& market = instance.markets[m];
        const std::string where = "market " + std::to_string(m) + " (" + market.id + ")";
        for (std::size_t other = 0; other < m; ++other) {
            if (instance.markets[other].id == market.id) {
                push(out, "duplicate_market", "duplicate market id '" + market.id + "'");
            }
        }
        if (!finite_nonneg(market.transport_cost)) {
            push(out, "negative_cost", where + ": transport cost " + fmt(market.transport_cost) + " < 0");
        }
        for (std::size_t c = 0; c < market.contracts.size(); ++c) {
            const auto& contract = market.contracts[c];
            const std::string at = "(m=" + std::to_string(m) + ",c=" + std::to_string(c) + ")";
            if (!(contract.max_volume > 0.0) || !std::isfinite(contract.max_volume)) {
                push(out, "contract_max_volume", "contract max_volume must be > 0 at " + at);
            }
            if (!finite_nonneg(contract.flex_above_min)) {
                push(out, "contract_flex", "contract flex_above_min must be >= 0 at " + at);
            }
            if (contract.wholesale_price.size() != instance.periods) {
                push(out, "contract_price_size", "wholesale_price length " +
                                                     std::to_string(contract.wholesale_price.size()) +
                                                     " != periods at " + at);
            }
            for (std::size_t t = 0; t < contract.wholesale_price.size(); ++t) {
                if (!std::isfinite(contract.wholesale_price[t])) {
                    push(out, "contract_price", "non-finite wholesale price at " + at + ",t=" + std::to_string(t));
                }
            }
        }
        if (market.elasticity) {
            const auto& rule = *market.elasticity;
            if (rule.steps == 0) push(out, "elasticity_steps", where + ": elasticity rule has zero steps");
            if (!(rule.width > 0.0)) push(out, "elasticity_width", where + ": elasticity width must be > 0");
            if (rule.steps > 1 && !(rule.decrement > kStaircaseTolerance)) {
                push(out, "elasticity_decrement", where + ": elasticity decrement must be > 0 with several steps");
            }
        }
    }

    for (std::size_t i = 0; i < instance.supply_steps.size(); ++i) {
        const auto& step = instance.supply_steps[i];
        if (!finite_nonneg(step.capacity) || !finite_nonneg(step.unit_cost)) {
            push(out, "negative_cost", "supply step " + std::to_string(i) + " has negative capacity or cost");
        }
    }
    for (std::size_t t = 0; t < instance.production_limits.size(); ++t) {
        const auto& lim = instance.production_limits[t];
        if (!finite_nonneg(lim.lower) || !finite_nonneg(lim.upper)) {
            push(out, "production_limits", "production limits at t=" + std::to_string(t) + " must be >= 0");
        }
        if (lim.lower > lim.upper) {
            push(out, "production_limits", "L_t " + fmt(lim.lower) + " > U_t " + fmt(lim.upper) +
                                               " at t=" + std::to_string(t));
        }
    }
    return out;
}

std::vector<Violation> validate_instance(const MarketInstance& instance, const ScenarioSet& scenarios) {
    auto out = validate_instance(instance);

    if (scenarios.num_scenarios() == 0) push(out, "no_scenarios", "scenario set is empty");
    if (scenarios.num_markets() != instance.num_markets()) {
        push(out, "scenario_markets", "scenario set covers " + std::to_string(scenarios.num_markets()) +
                                          " markets, instance has " + std::to_string(instance.num_markets()));
        return out;
    }
    if (scenarios.num_periods() != instance.periods) {
        push(out, "scenario_periods", "scenario set has " + std::to_string(scenarios.num_periods()) +
                                          " periods, instance has " + std::to_string(instance.periods));
        return out;
    }

    double sum = 0.0;
    for (std::size_t s = 0; s < scenarios.num_scenarios(); ++s) {
        const double p = scenarios.probability(s);
        sum += p;
        if (!(p > 0.0 && p <= 1.0)) {
            push(out, "probability_range", "probability " + fmt(p) + " outside (0,1] at s=" + std::to_string(s));
        }
    }
    if (scenarios.num_scenarios() > 0 && std::abs(sum - 1.0) > kProbabilityTolerance) {
        push(out, "probability_sum", "probability sum " + fmt(sum) + " != 1");
    }

    for (std::size_t m = 0; m < scenarios.num_markets(); ++m) {
        const auto& rule = instance.markets[m].elasticity;
        if (rule && rule->steps != scenarios.num_steps(m)) {
            push(out, "step_count", "market " + std::to_string(m) + " has " +
                                        std::to_string(scenarios.num_steps(m)) +
                                        " scenario steps, elasticity rule says " + std::to_string(rule->steps));
        }
        if (scenarios.num_steps(m) == 0) {
            push(out, "step_count", "market " + std::to_string(m) + " has no spot steps");
        }
        for (std::size_t t = 0; t < scenarios.num_periods(); ++t) {
            for (std::size_t s = 0; s < scenarios.num_scenarios(); ++s) {
                for (std::size_t k = 0; k < scenarios.num_steps(m); ++k) {
                    const std::string at = "(m=" + std::to_string(m) + ",t=" + std::to_string(t) +
                                           ",s=" + std::to_string(s) + ",k=" + std::to_string(k) + ")";
                    if (!scenarios.is_set(m, k, t, s)) {
                        push(out, "missing_spot", "missing spot entry at " + at);
                        continue;
                    }
                    const double width = scenarios.width(m, k, t, s);
                    const double price = scenarios.price(m, k, t, s);
                    if (!std::isfinite(price)) push(out, "spot_price", "non-finite spot price at " + at);
                    if (!(width > 0.0) || !std::isfinite(width)) {
                        push(out, "spot_width", "spot width " + fmt(width) + " must be > 0 at " + at);
                    }
                    if (k > 0 && scenarios.is_set(m, k - 1, t, s) &&
                        !(scenarios.price(m, k - 1, t, s) - price > kStaircaseTolerance)) {
                        push(out, "staircase", "non-descending staircase at " + at);
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace portalloc
