#pragma once

#include <stdexcept>
#include <vector>

#include "portalloc/linear_program.hpp"

namespace portalloc::testkit {

class DimensionTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct OracleResult {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    std::size_t systems_solved = 0;
};

inline constexpr std::size_t kOracleMaxColumns = 8;
inline constexpr std::size_t kOracleMaxRows = 12;

/// Exhaustive vertex enumeration for max c'x over a box-bounded polytope.
/// Every column is put at its lower bound, its upper bound or left free; the
/// free ones are fixed by choosing as many rows to hold with equality. The best
/// feasible candidate is the optimum. All bounds must be finite (the feasible
/// set is then a polytope, so Unbounded never occurs).
OracleResult brute_force_solve(const LinearProgram& lp, double feasibility_tol = 1e-9);

}  // namespace portalloc::testkit
