#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "portalloc/risk_metrics.hpp"

namespace portalloc {

struct SweepSpec {
    std::vector<double> alpha_grid;    ///< CVaR tail masses in (0, 1]
    std::vector<double> epsilon_grid;  ///< Wasserstein radii
    std::vector<double> gammas{0.90, 0.95};
    double lambda = 0.1;               ///< fixed across the CVaR curve
    Eigen::MatrixXd q;                 ///< required when epsilon_grid is non-empty
    DroPenalty dro_penalty = DroPenalty::PerScenario;
    std::size_t threads = 1;
    SimplexOptions simplex;
};

struct SweepFailure {
    ModelKind kind = ModelKind::RiskNeutral;
    double parameter = 0.0;  ///< alpha or epsilon of the failed grid point
    std::string error;
};

struct SweepResult {
    double zeta_riskfree = 0.0;
    std::vector<MetricRow> rows;  ///< sorted by spot_fraction, grid order within ties
    std::vector<SweepFailure> failures;
};

/// Solves the risk-neutral anchor, every CVaR grid point at fixed lambda and
/// every DRO grid point, and expands each solve into one MetricRow per gamma.
/// A failing grid point is recorded and the sweep continues. Throws
/// InvalidInput when both grids are empty and SolveFailed when the risk-free
/// reference itself cannot be solved.
SweepResult sweep(const MarketInstance& instance, const ScenarioSet& scenarios, const SweepSpec& spec);

}  // namespace portalloc
