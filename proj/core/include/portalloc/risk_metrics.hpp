#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "portalloc/domain.hpp"
#include "portalloc/report.hpp"
#include "portalloc/simplex.hpp"

namespace portalloc {

/// Expected profit over the worst (1 - gamma) probability tail.
///
/// Profits are sorted ascending (equal values merged) and probability mass is
/// accumulated up to 1 - gamma, the boundary scenario contributing only the
/// fraction that fits. Equals max over eta of
///   eta - (1 - gamma)^-1 * sum_s pi_s * max(eta - z_s, 0).
/// Throws ParameterOutOfRange unless gamma lies in (0, 1), DimensionMismatch
/// when the spans differ in length.
double empirical_cvar(std::span<const double> profits, std::span<const double> probabilities, double gamma);

/// Optimal risk-neutral profit with every spot allocation forced to zero.
/// Throws SolveFailed when contracts cannot absorb the minimum production.
double risk_free_profit(const MarketInstance& instance, const ScenarioSet& scenarios,
                        const SimplexOptions& options = {});

/// Builds, solves and extracts the report for one configuration.
/// Throws SolveFailed for Infeasible/Unbounded outcomes.
AllocationReport solve_allocation(const MarketInstance& instance, const ScenarioSet& scenarios,
                                  const FormulationConfig& config, const SimplexOptions& options = {});

struct MetricRow {
    ModelKind source = ModelKind::RiskNeutral;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<double> epsilon;
    double gamma = 0.0;
    double spot_fraction = 0.0;
    double zeta = 0.0;
    double chi = 0.0;
    double zeta_riskfree = 0.0;
    double delta_zeta = 0.0;
    double delta_chi = 0.0;
    std::optional<double> rho;  ///< absent when delta_chi is numerically zero
};

/// Metric suite of one report. `zeta_riskfree` is normally computed once with
/// risk_free_profit and reused.
MetricRow metric_row(const AllocationReport& report, const ScenarioSet& scenarios, double gamma,
                     double zeta_riskfree);

MetricRow metric_row(const AllocationReport& report, const MarketInstance& instance, const ScenarioSet& scenarios,
                     double gamma);

/// Spot share of expected production: sum_s pi_s * spot_s / sum_s pi_s * production_s.
double spot_fraction(const AllocationReport& report, const ScenarioSet& scenarios);

inline constexpr const char* kTradeoffCsvHeader =
    "source,alpha,lambda,epsilon,gamma,spot_fraction,zeta,chi,zeta_riskfree,delta_zeta,delta_chi,rho";

/// Header line plus one line per row; 9 significant digits, empty cells for
/// absent values.
std::string tradeoff_csv(std::span<const MetricRow> rows);

}  // namespace portalloc
