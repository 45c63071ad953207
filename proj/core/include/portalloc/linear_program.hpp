#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace portalloc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t column = 0;
    double value = 0.0;
};

struct LpRow {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

struct LpColumn {
    std::string name;
    double lower = 0.0;
    double upper = kInfinity;
    double objective = 0.0;
};

/// Maximization LP over bounded variables with sparse rows:
///   max c'x  s.t.  a_i'x {<=,=,>=} b_i,  l <= x <= u.
/// Ranged rows are expressed as two rows.
class LinearProgram {
public:
    std::size_t add_column(std::string name, double lower, double upper, double objective = 0.0);

    /// Duplicate column entries in `terms` are summed; zero coefficients dropped.
    std::size_t add_row(std::string name, std::vector<Term> terms, Relation relation, double rhs);

    void set_objective(std::size_t column, double coefficient);
    void add_objective(std::size_t column, double coefficient);
    void set_bounds(std::size_t column, double lower, double upper);

    std::size_t num_columns() const noexcept { return columns_.size(); }
    std::size_t num_rows() const noexcept { return rows_.size(); }
    const std::vector<LpColumn>& columns() const noexcept { return columns_; }
    const std::vector<LpRow>& rows() const noexcept { return rows_; }
    const LpColumn& column(std::size_t j) const { return columns_.at(j); }
    const LpRow& row(std::size_t i) const { return rows_.at(i); }

    /// Throws InvalidInput when a bound pair is inverted or a coefficient is not finite.
    void check() const;

    double objective_value(std::span<const double> x) const;
    double row_activity(std::size_t i, std::span<const double> x) const;
    /// Largest violation of any row relation at x (0 when all rows hold).
    double max_row_violation(std::span<const double> x) const;
    double max_bound_violation(std::span<const double> x) const;
    double rhs_inf_norm() const;

private:
    std::vector<LpColumn> columns_;
    std::vector<LpRow> rows_;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status) noexcept;

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;  ///< primal values, one per column (Optimal only)
    double objective = 0.0;
    std::vector<double> duals;   ///< row prices of the final basis (diagnostics)
    std::size_t iterations = 0;
};

/// Writes the LP in a line-oriented text form for cross-checking:
///   one `name: coeffs relation rhs` line per row, after an objective line and
///   followed by one `bound name: lower <= name <= upper` line per column.
/// Numbers use 12 significant digits.
std::string export_lp_text(const LinearProgram& lp);

}  // namespace portalloc
