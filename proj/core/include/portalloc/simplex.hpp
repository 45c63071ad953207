#pragma once

#include <cstddef>

#include "portalloc/linear_program.hpp"

namespace portalloc {

struct SimplexOptions {
    double feasibility_tolerance = 1e-7;
    double optimality_tolerance = 1e-9;
    /// Smallest admissible |u_ii| in a basis refactorization.
    double pivot_tolerance = 1e-11;
    /// Smallest |alpha_r| accepted as a ratio-test pivot.
    double ratio_pivot_tolerance = 1e-9;
    std::size_t refactor_interval = 50;
    /// 0 selects a limit proportional to the problem size.
    std::size_t max_iterations = 0;
};

/// Bounded-variable primal revised simplex with a two-phase start.
///
/// Pricing is Dantzig's largest reduced cost until 3 * (rows + columns)
/// consecutive iterations pass without objective improvement, after which the
/// phase continues under Bland's rule. The basis inverse is kept dense and
/// rebuilt from an LU factorization every `refactor_interval` pivots.
///
/// Returns Optimal, Infeasible or Unbounded. Throws NumericalFailure when the
/// basis becomes singular or the iteration limit is hit, and InvalidInput when
/// `lp.check()` fails.
LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace portalloc
