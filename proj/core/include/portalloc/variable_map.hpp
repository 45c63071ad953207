#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "portalloc/domain.hpp"

namespace portalloc {

/// Index-set sizes shared by every model built on one (instance, scenarios) pair.
struct ModelDimensions {
    std::vector<std::size_t> contracts;  ///< |C_m| per market
    std::vector<std::size_t> steps;      ///< |K_m| per market
    std::size_t supply_steps = 0;
    std::size_t periods = 0;
    std::size_t scenarios = 0;

    static ModelDimensions of(const MarketInstance& instance, const ScenarioSet& scenarios);

    std::size_t markets() const noexcept { return contracts.size(); }
    std::size_t total_contracts() const noexcept;
    std::size_t total_steps() const noexcept;
};

/// Column layout of the shared decision block plus model-specific extras.
///
/// Columns are laid out family by family in this order:
///   xmin[m,c], xterm[m,c,t,s], y[m,k,t,s], uprod[i,t,s], utrans[m,t,s], z[s],
///   then var and ell[s] (CVaR) or w[...] (DRO).
/// Within a family the last coordinate varies fastest.
class VariableMap {
public:
    VariableMap() = default;
    explicit VariableMap(ModelDimensions dims);

    const ModelDimensions& dims() const noexcept { return dims_; }

    std::size_t xmin(std::size_t m, std::size_t c) const;
    std::size_t xterm(std::size_t m, std::size_t c, std::size_t t, std::size_t s) const;
    std::size_t y(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const;
    std::size_t uprod(std::size_t i, std::size_t t, std::size_t s) const;
    std::size_t utrans(std::size_t m, std::size_t t, std::size_t s) const;
    std::size_t z(std::size_t s) const;

    /// Number of columns in the shared block (everything up to and including z).
    std::size_t base_columns() const noexcept { return base_columns_; }

    void add_cvar_block();
    /// `groups` is 1 for the per-scenario penalty and T for the per-period one.
    void add_dro_block(std::size_t groups);

    bool has_cvar() const noexcept { return var_.has_value(); }
    bool has_dro() const noexcept { return dro_groups_ > 0; }
    std::size_t var() const;
    std::size_t ell(std::size_t s) const;
    /// w[s, g, j] with g the period for per-period penalties (always 0 otherwise).
    std::size_t w(std::size_t s, std::size_t g, std::size_t j) const;
    std::size_t dro_groups() const noexcept { return dro_groups_; }

    std::size_t num_columns() const noexcept { return num_columns_; }

private:
    ModelDimensions dims_;
    std::vector<std::size_t> xmin_base_;
    std::vector<std::size_t> xterm_base_;
    std::vector<std::size_t> y_base_;
    std::size_t uprod_base_ = 0;
    std::size_t utrans_base_ = 0;
    std::size_t z_base_ = 0;
    std::size_t base_columns_ = 0;
    std::optional<std::size_t> var_;
    std::size_t ell_base_ = 0;
    std::size_t w_base_ = 0;
    std::size_t dro_groups_ = 0;
    std::size_t num_columns_ = 0;
};

}  // namespace portalloc
