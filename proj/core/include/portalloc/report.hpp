#pragma once

#include <string>
#include <vector>

#include "portalloc/domain.hpp"
#include "portalloc/formulations.hpp"
#include "portalloc/linear_program.hpp"

namespace portalloc {

/// Relative tolerance for recomputed scenario profits: |dz| <= tol * max(1, |z|).
inline constexpr double kProfitConsistencyTolerance = 1e-6;

/// Decisions and per-scenario profits read back from an optimal solve.
class AllocationReport {
public:
    AllocationReport(VariableMap layout, FormulationConfig config, std::vector<double> decisions,
                     std::vector<double> z, double objective_value, double lp_objective);

    const VariableMap& layout() const noexcept { return layout_; }
    const ModelDimensions& dims() const noexcept { return layout_.dims(); }
    const FormulationConfig& config() const noexcept { return config_; }

    double x_min(std::size_t m, std::size_t c) const { return values_[layout_.xmin(m, c)]; }
    double x_term(std::size_t m, std::size_t c, std::size_t t, std::size_t s) const {
        return values_[layout_.xterm(m, c, t, s)];
    }
    double y_spot(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const {
        return values_[layout_.y(m, k, t, s)];
    }
    double u_prod(std::size_t i, std::size_t t, std::size_t s) const { return values_[layout_.uprod(i, t, s)]; }
    double u_trans(std::size_t m, std::size_t t, std::size_t s) const { return values_[layout_.utrans(m, t, s)]; }

    const std::vector<double>& z() const noexcept { return z_; }
    /// Objective recomputed from the model formula (tie-break term excluded).
    double objective_value() const noexcept { return objective_value_; }
    /// Objective reported by the LP, tie-break included.
    double lp_objective() const noexcept { return lp_objective_; }

    /// Columns of the shared decision block in VariableMap order.
    const std::vector<double>& decisions() const noexcept { return values_; }

    double spot_volume(std::size_t s) const;
    double production_volume(std::size_t s) const;

private:
    VariableMap layout_;
    FormulationConfig config_;
    std::vector<double> values_;
    std::vector<double> z_;
    double objective_value_;
    double lp_objective_;
};

/// Reads decisions back by coordinate, recomputes every z_s from the profit
/// definition and the objective from the model formula.
/// Throws SolveFailed when the solution is not Optimal and ConsistencyError when a
/// recomputed z_s differs from the solver value beyond kProfitConsistencyTolerance.
AllocationReport extract_report(const LpSolution& solution, const BuiltModel& model, const MarketInstance& instance,
                                const ScenarioSet& scenarios);

/// Largest residuals of the structural constraints at a report.
struct ReportAudit {
    double profit = 0.0;            ///< max_s |z_s - recomputed z_s| / max(1, |z_s|)
    double supply_demand = 0.0;     ///< max_{t,s} |sum u - sum xterm - sum y|
    double supply_transport = 0.0;  ///< max_{t,s} |sum u - sum utrans|
    double contract_window = 0.0;   ///< max violation of xmin <= xterm <= xmin + X^+
    double bounds = 0.0;            ///< max violation of any variable bound
    double production = 0.0;        ///< max violation of L_t <= sum u <= U_t
};

ReportAudit audit_report(const AllocationReport& report, const MarketInstance& instance,
                         const ScenarioSet& scenarios);

/// Serializes a report as JSON with nested arrays indexed [m][c], [m][c][t][s],
/// [m][k][t][s], [i][t][s], [m][t][s] and [s]. Values use 9 significant digits.
std::string report_to_json(const AllocationReport& report, const MarketInstance& instance);

/// Formats with 9 significant digits (shortest form, no trailing zeros).
std::string format_sig9(double value);
/// Rounds to 9 significant digits.
double round_sig9(double value);

}  // namespace portalloc
