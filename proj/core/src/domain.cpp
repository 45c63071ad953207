#include "portalloc/domain.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "portalloc/errors.hpp"

namespace portalloc {

std::optional<std::size_t> MarketInstance::market_index(std::string_view id) const {
    for (std::size_t m = 0; m < markets.size(); ++m) {
        if (markets[m].id == id) return m;
    }
    return std::nullopt;
}

std::vector<std::string> MarketInstance::market_ids() const {
    std::vector<std::string> ids;
    ids.reserve(markets.size());
    for (const auto& market : markets) ids.push_back(market.id);
    return ids;
}

double MarketInstance::total_supply_capacity() const {
    double total = 0.0;
    for (const auto& step : supply_steps) total += step.capacity;
    return total;
}

ScenarioSet::ScenarioSet(std::vector<double> probabilities, std::size_t periods,
                         std::vector<std::size_t> steps_per_market)
    : probabilities_(std::move(probabilities)), periods_(periods), steps_(std::move(steps_per_market)) {
    offsets_.resize(steps_.size() + 1, 0);
    const std::size_t per_step = periods_ * probabilities_.size();
    for (std::size_t m = 0; m < steps_.size(); ++m) {
        offsets_[m + 1] = offsets_[m] + steps_[m] * per_step;
    }
    prices_.assign(offsets_.back(), 0.0);
    widths_.assign(offsets_.back(), 0.0);
    set_.assign(offsets_.back(), 0);
}

std::size_t ScenarioSet::flat(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
    if (m >= steps_.size() || k >= steps_[m] || t >= periods_ || s >= probabilities_.size()) {
        throw std::out_of_range("scenario coordinate out of range");
    }
    return offsets_[m] + (k * periods_ + t) * probabilities_.size() + s;
}

double ScenarioSet::price(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
    return prices_[flat(m, k, t, s)];
}

double ScenarioSet::width(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
    return widths_[flat(m, k, t, s)];
}

void ScenarioSet::set_step(std::size_t m, std::size_t k, std::size_t t, std::size_t s,
                           double price, double width) {
    const auto i = flat(m, k, t, s);
    prices_[i] = price;
    widths_[i] = width;
    set_[i] = 1;
}

bool ScenarioSet::is_set(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
    return set_[flat(m, k, t, s)] != 0;
}

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::RiskNeutral: return "risk_neutral";
        case ModelKind::Cvar: return "cvar";
        case ModelKind::Dro: return "dro";
    }
    return "unknown";
}

std::string_view to_string(DroPenalty mode) noexcept {
    return mode == DroPenalty::PerScenario ? "per_scenario" : "per_period";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept {
    if (text == "risk_neutral" || text == "rn" || text == "risk-neutral") return ModelKind::RiskNeutral;
    if (text == "cvar") return ModelKind::Cvar;
    if (text == "dro") return ModelKind::Dro;
    return std::nullopt;
}

std::optional<DroPenalty> parse_dro_penalty(std::string_view text) noexcept {
    if (text == "per_scenario") return DroPenalty::PerScenario;
    if (text == "per_period") return DroPenalty::PerPeriod;
    return std::nullopt;
}

FormulationConfig FormulationConfig::risk_neutral() { return {}; }

FormulationConfig FormulationConfig::cvar(double alpha, double lambda) {
    FormulationConfig config;
    config.kind = ModelKind::Cvar;
    config.alpha = alpha;
    config.lambda = lambda;
    return config;
}

FormulationConfig FormulationConfig::dro(double epsilon, Eigen::MatrixXd q, DroPenalty mode) {
    FormulationConfig config;
    config.kind = ModelKind::Dro;
    config.epsilon = epsilon;
    config.q = std::move(q);
    config.dro_penalty = mode;
    return config;
}

void FormulationConfig::check() const {
    switch (kind) {
        case ModelKind::RiskNeutral: return;
        case ModelKind::Cvar:
            if (!(alpha > 0.0 && alpha <= 1.0)) {
                throw ParameterOutOfRange("alpha must lie in (0,1], got " + std::to_string(alpha));
            }
            if (!(lambda >= 0.0 && lambda <= 1.0)) {
                throw ParameterOutOfRange("lambda must lie in [0,1], got " + std::to_string(lambda));
            }
            return;
        case ModelKind::Dro:
            if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
                throw ParameterOutOfRange("epsilon must be finite and >= 0, got " + std::to_string(epsilon));
            }
            if (!q.allFinite()) throw ParameterOutOfRange("Q matrix has non-finite entries");
            return;
    }
}

}  // namespace portalloc
