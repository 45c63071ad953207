#include "portalloc/variable_map.hpp"

#include <numeric>
#include <stdexcept>

namespace portalloc {

ModelDimensions ModelDimensions::of(const MarketInstance& instance, const ScenarioSet& scenarios) {
    ModelDimensions dims;
    for (std::size_t m = 0; m < instance.num_markets(); ++m) {
        dims.contracts.push_back(instance.num_contracts(m));
        dims.steps.push_back(m < scenarios.num_markets() ? scenarios.num_steps(m) : 0);
    }
    dims.supply_steps = instance.num_supply_steps();
    dims.periods = instance.periods;
    dims.scenarios = scenarios.num_scenarios();
    return dims;
}

std::size_t ModelDimensions::total_contracts() const noexcept {
    return std::accumulate(contracts.begin(), contracts.end(), std::size_t{0});
}

std::size_t ModelDimensions::total_steps() const noexcept {
    return std::accumulate(steps.begin(), steps.end(), std::size_t{0});
}

VariableMap::VariableMap(ModelDimensions dims) : dims_(std::move(dims)) {
    const std::size_t ts = dims_.periods * dims_.scenarios;
    std::size_t next = 0;
    for (std::size_t m = 0; m < dims_.markets(); ++m) {
        xmin_base_.push_back(next);
        next += dims_.contracts[m];
    }
    for (std::size_t m = 0; m < dims_.markets(); ++m) {
        xterm_base_.push_back(next);
        next += dims_.contracts[m] * ts;
    }
    for (std::size_t m = 0; m < dims_.markets(); ++m) {
        y_base_.push_back(next);
        next += dims_.steps[m] * ts;
    }
    uprod_base_ = next;
    next += dims_.supply_steps * ts;
    utrans_base_ = next;
    next += dims_.markets() * ts;
    z_base_ = next;
    next += dims_.scenarios;
    base_columns_ = next;
    num_columns_ = next;
}

namespace {
void require(bool ok) {
    if (!ok) throw std::out_of_range("variable coordinate out of range");
}
}  // namespace

std::size_t VariableMap::xmin(std::size_t m, std::size_t c) const {
    require(m < dims_.markets() && c < dims_.contracts[m]);
    return xmin_base_[m] + c;
}

std::size_t VariableMap::xterm(std::size_t m, std::size_t c, std::size_t t, std::size_t s) const {
    require(m < dims_.markets() && c < dims_.contracts[m] && t < dims_.periods && s < dims_.scenarios);
    return xterm_base_[m] + (c * dims_.periods + t) * dims_.scenarios + s;
}

std::size_t VariableMap::y(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
    require(m < dims_.markets() && k < dims_.steps[m] && t < dims_.periods && s < dims_.scenarios);
    return y_base_[m] + (k * dims_.periods + t) * dims_.scenarios + s;
}

std::size_t VariableMap::uprod(std::size_t i, std::size_t t, std::size_t s) const {
    require(i < dims_.supply_steps && t < dims_.periods && s < dims_.scenarios);
    return uprod_base_ + (i * dims_.periods + t) * dims_.scenarios + s;
}

std::size_t VariableMap::utrans(std::size_t m, std::size_t t, std::size_t s) const {
    require(m < dims_.markets() && t < dims_.periods && s < dims_.scenarios);
    return utrans_base_ + (m * dims_.periods + t) * dims_.scenarios + s;
}

std::size_t VariableMap::z(std::size_t s) const {
    require(s < dims_.scenarios);
    return z_base_ + s;
}

void VariableMap::add_cvar_block() {
    if (var_ || has_dro()) throw std::logic_error("variable map already has a model-specific block");
    var_ = num_columns_;
    ell_base_ = num_columns_ + 1;
    num_columns_ += 1 + dims_.scenarios;
}

void VariableMap::add_dro_block(std::size_t groups) {
    if (var_ || has_dro()) throw std::logic_error("variable map already has a model-specific block");
    if (groups == 0) throw std::invalid_argument("DRO block needs at least one group");
    dro_groups_ = groups;
    w_base_ = num_columns_;
    num_columns_ += dims_.scenarios * groups * dims_.markets();
}

std::size_t VariableMap::var() const {
    require(var_.has_value());
    return *var_;
}

std::size_t VariableMap::ell(std::size_t s) const {
    require(var_.has_value() && s < dims_.scenarios);
    return ell_base_ + s;
}

std::size_t VariableMap::w(std::size_t s, std::size_t g, std::size_t j) const {
    require(dro_groups_ > 0 && s < dims_.scenarios && g < dro_groups_ && j < dims_.markets());
    return w_base_ + (s * dro_groups_ + g) * dims_.markets() + j;
}

}  // namespace portalloc
