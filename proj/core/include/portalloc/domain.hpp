#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace portalloc {

// All coordinates (m, c, k, i, t, s) are dense 0-based indices. Market ids are
// mapped to indices through MarketInstance::market_index.

/// A long-term contract offered in one market. Volume window per period is
/// [x_min, x_min + flex_above_min], with x_min chosen once for the horizon.
struct ContractSpec {
    std::vector<double> wholesale_price;  ///< $/MWh, one entry per period
    double max_volume = 0.0;              ///< MW
    double flex_above_min = 0.0;          ///< MW
};

/// Rule that expands one nominal spot price into a descending staircase:
/// step k pays `P_top - k * decrement` on a block of `width` MW.
struct ElasticityRule {
    std::size_t steps = 1;
    double width = 0.0;
    double decrement = 0.0;
};

struct Market {
    std::string id;
    std::vector<ContractSpec> contracts;
    double transport_cost = 0.0;  ///< $/MWh
    std::optional<ElasticityRule> elasticity;
};

struct SupplyStep {
    double capacity = 0.0;   ///< MW
    double unit_cost = 0.0;  ///< $/MWh
};

struct ProductionLimit {
    double lower = 0.0;  ///< MW
    double upper = 0.0;  ///< MW
};

/// Static problem data. Scenario-dependent spot data lives in ScenarioSet.
struct MarketInstance {
    std::vector<Market> markets;
    std::vector<SupplyStep> supply_steps;
    std::vector<ProductionLimit> production_limits;  ///< one per period
    std::size_t periods = 0;

    std::size_t num_markets() const noexcept { return markets.size(); }
    std::size_t num_contracts(std::size_t m) const { return markets.at(m).contracts.size(); }
    std::size_t num_supply_steps() const noexcept { return supply_steps.size(); }

    std::optional<std::size_t> market_index(std::string_view id) const;
    std::vector<std::string> market_ids() const;
    double total_supply_capacity() const;
};

/// Finite scenario set: probabilities and the spot staircase for every (m, k, t, s).
class ScenarioSet {
public:
    ScenarioSet() = default;
    ScenarioSet(std::vector<double> probabilities, std::size_t periods,
                std::vector<std::size_t> steps_per_market);

    std::size_t num_scenarios() const noexcept { return probabilities_.size(); }
    std::size_t num_periods() const noexcept { return periods_; }
    std::size_t num_markets() const noexcept { return steps_.size(); }
    std::size_t num_steps(std::size_t m) const { return steps_.at(m); }
    const std::vector<std::size_t>& steps_per_market() const noexcept { return steps_; }

    const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    double probability(std::size_t s) const { return probabilities_.at(s); }

    double price(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const;
    double width(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const;
    void set_step(std::size_t m, std::size_t k, std::size_t t, std::size_t s,
                  double price, double width);

    /// Whether (m, k, t, s) received a value through set_step.
    bool is_set(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const;

private:
    std::size_t flat(std::size_t m, std::size_t k, std::size_t t, std::size_t s) const;

    std::vector<double> probabilities_;
    std::size_t periods_ = 0;
    std::vector<std::size_t> steps_;
    std::vector<std::size_t> offsets_;
    std::vector<double> prices_;
    std::vector<double> widths_;
    std::vector<unsigned char> set_;
};

enum class ModelKind { RiskNeutral, Cvar, Dro };

/// How the DRO penalty groups spot volume before applying ||Q^T y||_1.
enum class DroPenalty {
    PerScenario,  ///< y_m = sum over periods and steps; one norm per scenario
    PerPeriod,    ///< one norm per (period, scenario), summed over periods
};

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(DroPenalty mode) noexcept;
std::optional<ModelKind> parse_model_kind(std::string_view text) noexcept;
std::optional<DroPenalty> parse_dro_penalty(std::string_view text) noexcept;

struct FormulationConfig {
    ModelKind kind = ModelKind::RiskNeutral;
    double alpha = 0.95;   ///< probability mass of the CVaR lower tail, (0, 1]; 1 is the mean
    double lambda = 1.0;   ///< weight on expected profit, [0, 1]
    double epsilon = 0.0;  ///< Wasserstein radius, >= 0
    Eigen::MatrixXd q;     ///< |M| x |M| lower-triangular
    DroPenalty dro_penalty = DroPenalty::PerScenario;

    static FormulationConfig risk_neutral();
    static FormulationConfig cvar(double alpha, double lambda);
    static FormulationConfig dro(double epsilon, Eigen::MatrixXd q,
                                 DroPenalty mode = DroPenalty::PerScenario);

    /// Throws ParameterOutOfRange when alpha/lambda/epsilon leave their domains.
    void check() const;
};

}  // namespace portalloc
