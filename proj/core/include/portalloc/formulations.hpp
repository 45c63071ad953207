#pragma once

#include <functional>

#include <Eigen/Dense>

#include "portalloc/domain.hpp"
#include "portalloc/linear_program.hpp"
#include "portalloc/variable_map.hpp"

namespace portalloc {

/// Weight of the secondary objective that penalizes total spot volume
/// (summed over m, k, t, s) so ties between equally profitable allocations
/// resolve toward less spot exposure.
inline constexpr double kSpotTieBreakWeight = 1e-7;

struct BuildOptions {
    double tie_break_weight = kSpotTieBreakWeight;
    /// Force every spot upper bound to zero (the risk-free allocation).
    bool zero_spot = false;
    /// Hook for extra linear side constraints on the shared decision block.
    std::function<void(LinearProgram&, const VariableMap&)> side_constraints;
};

/// Deterministic-equivalent LP plus the map from model coordinates to columns.
struct BuiltModel {
    LinearProgram lp;
    VariableMap map;
    FormulationConfig config;
    double tie_break_weight = 0.0;
};

/// Risk-neutral two-stage model: maximize expected profit over the shared
/// constraint block (profit definition, contract windows, supply/demand and
/// supply/transport balance, production limits, variable bounds).
///
/// Contract windows with zero flexibility are a single equality row.
/// Production-limit rows are emitted only where variable bounds do not already
/// imply them: an equality when L_t == U_t, otherwise a `>=` row when L_t > 0
/// and a `<=` row when U_t is below the total supply capacity.
///
/// Throws InvalidInput for inputs failing validate_instance and
/// InfeasibleStructure when total supply capacity is below some L_t.
BuiltModel build_risk_neutral(const MarketInstance& instance, const ScenarioSet& scenarios,
                              const BuildOptions& options = {});

/// Convex combination of expected profit (weight lambda) and the expected
/// profit over the lowest `alpha` probability mass:
///   lambda * sum pi z + (1 - lambda) * (var - sum pi ell / alpha),
/// with a free VaR column and shortfalls ell_s >= var - z_s, ell_s >= 0.
/// alpha = 1 makes the tail term the plain expectation.
BuiltModel build_cvar(const MarketInstance& instance, const ScenarioSet& scenarios, double alpha, double lambda,
                      const BuildOptions& options = {});

/// Expected profit minus epsilon * sum_s pi_s ||Q' y_s||_1, with the L1 norm
/// linearized by w >= +-(Q' y_s). y_s aggregates spot volume per market over
/// steps and periods (PerScenario) or over steps only (PerPeriod).
/// Throws DimensionMismatch when Q is not |M| x |M|.
BuiltModel build_dro(const MarketInstance& instance, const ScenarioSet& scenarios, double epsilon,
                     const Eigen::MatrixXd& q, DroPenalty mode = DroPenalty::PerScenario,
                     const BuildOptions& options = {});

BuiltModel build_model(const MarketInstance& instance, const ScenarioSet& scenarios,
                       const FormulationConfig& config, const BuildOptions& options = {});

/// Scenario profit recomputed from the profit definition at a column vector x.
double scenario_profit(const MarketInstance& instance, const ScenarioSet& scenarios, const VariableMap& map,
                       std::span<const double> x, std::size_t s);

}  // namespace portalloc
