#include "portalloc/linear_program.hpp"

#include <algorithm>
#include <cmath>

#include "portalloc/errors.hpp"

namespace portalloc {

std::size_t LinearProgram::add_column(std::string name, double lower, double upper, double objective) {
    columns_.push_back({std::move(name), lower, upper, objective});
    return columns_.size() - 1;
}

std::size_t LinearProgram::add_row(std::string name, std::vector<Term> terms, Relation relation, double rhs) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.column < b.column; });
    std::vector<Term> merged;
    merged.reserve(terms.size());
    for (const auto& term : terms) {
        if (term.column >= columns_.size()) throw InvalidInput("row '" + name + "' references unknown column");
        if (!merged.empty() && merged.back().column == term.column) {
            merged.back().value += term.value;
        } else {
            merged.push_back(term);
        }
    }
    std::erase_if(merged, [](const Term& t) { return t.value == 0.0; });
    rows_.push_back({std::move(name), std::move(merged), relation, rhs});
    return rows_.size() - 1;
}

void LinearProgram::set_objective(std::size_t column, double coefficient) { columns_.at(column).objective = coefficient; }

void LinearProgram::add_objective(std::size_t column, double coefficient) { columns_.at(column).objective += coefficient; }

void LinearProgram::set_bounds(std::size_t column, double lower, double upper) {
    auto& col = columns_.at(column);
    col.lower = lower;
    col.upper = upper;
}

void LinearProgram::check() const {
    for (const auto& col : columns_) {
        if (std::isnan(col.lower) || std::isnan(col.upper) || col.lower > col.upper) {
            throw InvalidInput("column '" + col.name + "' has inverted or NaN bounds");
        }
        if (col.lower == kInfinity || col.upper == -kInfinity) {
            throw InvalidInput("column '" + col.name + "' has an empty bound interval");
        }
        if (!std::isfinite(col.objective)) throw InvalidInput("column '" + col.name + "' has a non-finite cost");
    }
    for (const auto& row : rows_) {
        if (!std::isfinite(row.rhs)) throw InvalidInput("row '" + row.name + "' has a non-finite rhs");
        for (const auto& t : row.terms) {
            if (!std::isfinite(t.value)) throw InvalidInput("row '" + row.name + "' has a non-finite coefficient");
        }
    }
}

double LinearProgram::objective_value(std::span<const double> x) const {
    double total = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) total += columns_[j].objective * x[j];
    return total;
}

double LinearProgram::row_activity(std::size_t i, std::span<const double> x) const {
    double total = 0.0;
    for (const auto& t : rows_.at(i).terms) total += t.value * x[t.column];
    return total;
}

double LinearProgram::max_row_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double gap = row_activity(i, x) - rows_[i].rhs;
        double violation = 0.0;
        switch (rows_[i].relation) {
            case Relation::LessEqual: violation = std::max(gap, 0.0); break;
            case Relation::GreaterEqual: violation = std::max(-gap, 0.0); break;
            case Relation::Equal: violation = std::abs(gap); break;
        }
        worst = std::max(worst, violation);
    }
    return worst;
}

double LinearProgram::max_bound_violation(std::span<const double> x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        worst = std::max({worst, columns_[j].lower - x[j], x[j] - columns_[j].upper});
    }
    return worst;
}

double LinearProgram::rhs_inf_norm() const {
    double norm = 0.0;
    for (const auto& row : rows_) norm = std::max(norm, std::abs(row.rhs));
    return norm;
}

std::string_view to_string(LpStatus status) noexcept {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

}  // namespace portalloc
