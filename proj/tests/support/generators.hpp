#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "portalloc/domain.hpp"
#include "portalloc/linear_program.hpp"

namespace portalloc::testkit {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

/// Positive probabilities summing to one (normalized uniform draws).
std::vector<double> random_probabilities(Rng& rng, std::size_t n);

struct Problem {
    MarketInstance instance;
    ScenarioSet scenarios;
};

struct InstanceLimits {
    std::size_t markets = 2;
    std::size_t contracts = 3;
    std::size_t steps = 3;
    std::size_t periods = 2;
    std::size_t scenarios = 4;
    std::size_t supply_steps = 2;
};

/// Random feasible instance within `limits`: strictly descending staircases,
/// supply capacity and total spot width both above every L_t.
Problem random_problem(Rng& rng, const InstanceLimits& limits = {});

/// One market, one period, L = U = 100 MW, zero costs, one contract at 30 $/MWh
/// (max 100, no flexibility), one spot step of 100 MW, prices {p0, p1} at
/// probability 1/2 each.
Problem micro_problem(double p0 = 50.0, double p1 = 20.0);

/// Random LP with integer data in [-9, 9], 1..max_columns columns,
/// 1..max_rows rows and finite integer bounds. About half are feasible by
/// construction; the rest have random right-hand sides.
LinearProgram random_lp(Rng& rng, std::size_t max_columns, std::size_t max_rows);

/// Symmetric PSD matrix A A^T with A n x r (r = n for full rank).
Eigen::MatrixXd random_psd(Rng& rng, std::size_t n, std::size_t rank);

}  // namespace portalloc::testkit
