#include <gtest/gtest.h>

#include "generators.hpp"
#include "portalloc/errors.hpp"
#include "portalloc/formulations.hpp"
#include "portalloc/report.hpp"
#include "portalloc/simplex.hpp"
#include "portalloc/validate.hpp"

using namespace portalloc;

namespace {

struct Solved {
    BuiltModel model;
    LpSolution solution;
};

Solved run(const testkit::Problem& p, const FormulationConfig& config, const BuildOptions& opts = {}) {
    auto model = build_model(p.instance, p.scenarios, config, opts);
    auto solution = solve(model.lp);
    return {std::move(model), std::move(solution)};
}

AllocationReport report_of(const testkit::Problem& p, const FormulationConfig& config) {
    auto s = run(p, config);
    return extract_report(s.solution, s.model, p.instance, p.scenarios);
}

double total_spot(const AllocationReport& r) {
    double v = 0;
    for (std::size_t s = 0; s < r.dims().scenarios; ++s) v += r.spot_volume(s);
    return v;
}

// Vertex allocations of the micro instance: q MW to spot, the rest to the contract.
double micro_expected(double q, double p0, double p1) { return 0.5 * (p0 * q + 30 * (100 - q)) + 0.5 * (p1 * q + 30 * (100 - q)); }

}  // namespace

TEST(Layout, ColumnAndRowCounts) {
    testkit::Problem p;
    Market market;
    market.id = "A";
    market.contracts.push_back({{30.0}, 50.0, 10.0});
    p.instance.markets.push_back(market);
    p.instance.supply_steps.push_back({100.0, 1.0});
    p.instance.production_limits.push_back({0.0, 100.0});
    p.instance.periods = 1;
    p.scenarios = ScenarioSet({0.5, 0.5}, 1, {2});
    for (std::size_t s = 0; s < 2; ++s) {
        p.scenarios.set_step(0, 0, 0, s, 40.0, 30.0);
        p.scenarios.set_step(0, 1, 0, s, 39.0, 30.0);
    }
    const auto model = build_risk_neutral(p.instance, p.scenarios);
    EXPECT_EQ(model.lp.num_columns(), 13u);
    EXPECT_EQ(model.lp.num_rows(), 10u);

    // Equal limits add one equality row per (t, s).
    p.instance.production_limits[0] = {60.0, 60.0};
    EXPECT_EQ(build_risk_neutral(p.instance, p.scenarios).lp.num_rows(), 12u);
    // Zero flexibility folds each window into one equality.
    p.instance.markets[0].contracts[0].flex_above_min = 0.0;
    EXPECT_EQ(build_risk_neutral(p.instance, p.scenarios).lp.num_rows(), 10u);
}

TEST(Layout, VariableMapIsBijective) {
    testkit::Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testkit::random_problem(rng);
        for (const auto& config : {FormulationConfig::cvar(0.3, 0.4),
                                   FormulationConfig::dro(1.0, Eigen::MatrixXd::Identity(
                                                                   static_cast<Eigen::Index>(p.instance.num_markets()),
                                                                   static_cast<Eigen::Index>(p.instance.num_markets())),
                                                          DroPenalty::PerPeriod)}) {
            const auto model = build_model(p.instance, p.scenarios, config);
            const auto& map = model.map;
            const auto& d = map.dims();
            std::vector<int> seen(model.lp.num_columns(), 0);
            for (std::size_t m = 0; m < d.markets(); ++m) {
                for (std::size_t c = 0; c < d.contracts[m]; ++c) {
                    ++seen[map.xmin(m, c)];
                    for (std::size_t t = 0; t < d.periods; ++t)
                        for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.xterm(m, c, t, s)];
                }
                for (std::size_t k = 0; k < d.steps[m]; ++k)
                    for (std::size_t t = 0; t < d.periods; ++t)
                        for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.y(m, k, t, s)];
                for (std::size_t t = 0; t < d.periods; ++t)
                    for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.utrans(m, t, s)];
            }
            for (std::size_t i = 0; i < d.supply_steps; ++i)
                for (std::size_t t = 0; t < d.periods; ++t)
                    for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.uprod(i, t, s)];
            for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.z(s)];
            if (map.has_cvar()) {
                ++seen[map.var()];
                for (std::size_t s = 0; s < d.scenarios; ++s) ++seen[map.ell(s)];
            }
            if (map.has_dro()) {
                for (std::size_t s = 0; s < d.scenarios; ++s)
                    for (std::size_t g = 0; g < map.dro_groups(); ++g)
                        for (std::size_t j = 0; j < d.markets(); ++j) ++seen[map.w(s, g, j)];
            }
            for (std::size_t j = 0; j < seen.size(); ++j) EXPECT_EQ(seen[j], 1) << "column " << j;
        }
    }
}

TEST(RiskNeutral, MicroAllSpot) {
    const auto p = testkit::micro_problem(50, 20);
    const auto r = report_of(p, FormulationConfig::risk_neutral());
    // Enumerated vertices: all-contract 3000, split 3250, all-spot 3500.
    EXPECT_DOUBLE_EQ(micro_expected(100, 50, 20), 3500);
    EXPECT_NEAR(r.objective_value(), 3500, 1e-6);
    EXPECT_NEAR(r.x_min(0, 0), 0, 1e-9);
    EXPECT_NEAR(r.z()[0], 5000, 1e-6);
    EXPECT_NEAR(r.z()[1], 2000, 1e-6);
    EXPECT_NEAR(r.spot_volume(0), 100, 1e-9);
    EXPECT_NEAR(r.spot_volume(1), 100, 1e-9);
}

TEST(RiskNeutral, MicroAllContract) {
    const auto p = testkit::micro_problem(40, 10);
    const auto r = report_of(p, FormulationConfig::risk_neutral());
    EXPECT_DOUBLE_EQ(micro_expected(0, 40, 10), 3000);
    EXPECT_NEAR(r.objective_value(), 3000, 1e-6);
    EXPECT_NEAR(r.x_min(0, 0), 100, 1e-9);
    EXPECT_NEAR(total_spot(r), 0, 1e-9);
}

TEST(RiskNeutral, InfeasibleStructureBeforeSolve) {
    auto p = testkit::micro_problem();
    p.instance.production_limits[0] = {150, 150};
    EXPECT_THROW(build_risk_neutral(p.instance, p.scenarios), InfeasibleStructure);
}

TEST(RiskNeutral, RejectsInvalidInput) {
    auto p = testkit::micro_problem();
    p.instance.supply_steps[0].capacity = -5;
    EXPECT_THROW(build_risk_neutral(p.instance, p.scenarios), InvalidInput);
}

TEST(Cvar, MicroTailPrefersContract) {
    const auto p = testkit::micro_problem(50, 20);
    const auto r = report_of(p, FormulationConfig::cvar(0.5, 0.0));
    // Tail (mass 1/2) of all-contract is 3000, of all-spot 2000.
    EXPECT_NEAR(r.objective_value(), 3000, 1e-6);
    EXPECT_NEAR(total_spot(r), 0, 1e-9);
    EXPECT_NEAR(r.x_min(0, 0), 100, 1e-9);
}

TEST(Cvar, LambdaOneMatchesRiskNeutral) {
    testkit::Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = testkit::random_problem(rng);
        const auto rn = run(p, FormulationConfig::risk_neutral());
        const double alpha = testkit::uniform(rng, 0.05, 0.95);
        const auto cv = run(p, FormulationConfig::cvar(alpha, 1.0));
        ASSERT_EQ(rn.solution.status, LpStatus::Optimal);
        ASSERT_EQ(cv.solution.status, LpStatus::Optimal);
        const auto a = extract_report(rn.solution, rn.model, p.instance, p.scenarios);
        const auto b = extract_report(cv.solution, cv.model, p.instance, p.scenarios);
        EXPECT_NEAR(a.objective_value(), b.objective_value(), 1e-6 * (1 + std::abs(a.objective_value())));
    }
}

TEST(Cvar, SingleScenarioMatchesRiskNeutral) {
    testkit::Rng rng(9);
    testkit::InstanceLimits limits;
    limits.scenarios = 1;
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testkit::random_problem(rng, limits);
        const double base = report_of(p, FormulationConfig::risk_neutral()).objective_value();
        const double alpha = testkit::uniform(rng, 0.05, 1.0);
        const double lambda = testkit::uniform(rng, 0.0, 1.0);
        EXPECT_NEAR(report_of(p, FormulationConfig::cvar(alpha, lambda)).objective_value(), base,
                    1e-6 * (1 + std::abs(base)));
    }
}

TEST(Cvar, ObjectiveMonotoneInAlpha) {
    testkit::Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testkit::random_problem(rng);
        const double lambda = testkit::uniform(rng, 0.0, 0.9);
        double prev = -kInfinity;
        for (double alpha : {0.05, 0.2, 0.5, 0.8, 1.0}) {
            const double obj = report_of(p, FormulationConfig::cvar(alpha, lambda)).objective_value();
            EXPECT_GE(obj, prev - 1e-6 * (1 + std::abs(obj))) << "alpha " << alpha;
            prev = obj;
        }
    }
}

TEST(Cvar, AlphaOneIsTheExpectation) {
    testkit::Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testkit::random_problem(rng);
        const double base = report_of(p, FormulationConfig::risk_neutral()).objective_value();
        EXPECT_NEAR(report_of(p, FormulationConfig::cvar(1.0, 0.0)).objective_value(), base, 1e-6 * (1 + std::abs(base)));
    }
}

TEST(Dro, MicroTieBrokenTowardContract) {
    const auto p = testkit::micro_problem(50, 20);
    const auto r = report_of(p, FormulationConfig::dro(5.0, Eigen::MatrixXd::Identity(1, 1)));
    // All-spot: 3500 - 5 * 100 = 3000, equal to all-contract.
    EXPECT_NEAR(r.objective_value(), 3000, 1e-6);
    EXPECT_NEAR(total_spot(r), 0, 1e-9);
}

TEST(Dro, ZeroRadiusAndZeroQMatchRiskNeutral) {
    testkit::Rng rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        const auto p = testkit::random_problem(rng);
        const auto m = static_cast<Eigen::Index>(p.instance.num_markets());
        const double base = report_of(p, FormulationConfig::risk_neutral()).objective_value();
        const double tol = 1e-6 * (1 + std::abs(base));
        EXPECT_NEAR(report_of(p, FormulationConfig::dro(0.0, testkit::random_psd(rng, m, m))).objective_value(), base, tol);
        EXPECT_NEAR(report_of(p, FormulationConfig::dro(7.0, Eigen::MatrixXd::Zero(m, m))).objective_value(), base, tol);
    }
}

TEST(Dro, ObjectiveNonIncreasingInEpsilon) {
    testkit::Rng rng(14);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = testkit::random_problem(rng);
        const auto m = static_cast<Eigen::Index>(p.instance.num_markets());
        Eigen::MatrixXd q = testkit::random_psd(rng, m, m).llt().matrixL();
        for (auto mode : {DroPenalty::PerScenario, DroPenalty::PerPeriod}) {
            double prev = kInfinity;
            for (double eps : {0.0, 0.1, 0.5, 2.0, 10.0}) {
                const double obj = report_of(p, FormulationConfig::dro(eps, q, mode)).objective_value();
                EXPECT_LE(obj, prev + 1e-6 * (1 + std::abs(obj)));
                prev = obj;
            }
        }
    }
}

TEST(Dro, ZeroSpotIgnoresPenalty) {
    const auto p = testkit::micro_problem(50, 20);
    BuildOptions opts;
    opts.zero_spot = true;
    auto s = run(p, FormulationConfig::dro(3.0, Eigen::MatrixXd::Constant(1, 1, 2.0)), opts);
    ASSERT_EQ(s.solution.status, LpStatus::Optimal);
    EXPECT_NEAR(extract_report(s.solution, s.model, p.instance, p.scenarios).objective_value(), 3000, 1e-6);
}

TEST(Dro, PenaltyModesDifferOnlyAcrossPeriods) {
    testkit::Rng rng(15);
    testkit::InstanceLimits one_period;
    one_period.periods = 1;
    for (int trial = 0; trial < 15; ++trial) {
        const auto p = testkit::random_problem(rng, one_period);
        const auto m = static_cast<Eigen::Index>(p.instance.num_markets());
        const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(m, m);
        const double a = report_of(p, FormulationConfig::dro(1.5, q, DroPenalty::PerScenario)).objective_value();
        const double b = report_of(p, FormulationConfig::dro(1.5, q, DroPenalty::PerPeriod)).objective_value();
        EXPECT_NEAR(a, b, 1e-6 * (1 + std::abs(a)));
    }
}

TEST(Dro, QShapeChecked) {
    const auto p = testkit::micro_problem();
    EXPECT_THROW(build_dro(p.instance, p.scenarios, 1.0, Eigen::MatrixXd::Identity(2, 2)), DimensionMismatch);
}

TEST(Report, AuditInvariantsOnRandomInstances) {
    testkit::Rng rng(16);
    for (int trial = 0; trial < 40; ++trial) {
        const auto p = testkit::random_problem(rng);
        const auto m = static_cast<Eigen::Index>(p.instance.num_markets());
        for (const auto& config : {FormulationConfig::risk_neutral(), FormulationConfig::cvar(0.3, 0.2),
                                   FormulationConfig::dro(0.7, Eigen::MatrixXd::Identity(m, m))}) {
            const auto r = report_of(p, config);
            const auto audit = audit_report(r, p.instance, p.scenarios);
            EXPECT_LE(audit.profit, 1e-6);
            EXPECT_LE(audit.supply_demand, 1e-7);
            EXPECT_LE(audit.supply_transport, 1e-7);
            EXPECT_LE(audit.contract_window, 1e-9);
            EXPECT_LE(audit.bounds, 1e-9);
            EXPECT_LE(audit.production, 1e-7);
        }
    }
}

TEST(Report, RejectsNonOptimalAndInconsistent) {
    const auto p = testkit::micro_problem();
    auto s = run(p, FormulationConfig::risk_neutral());
    LpSolution bad = s.solution;
    bad.status = LpStatus::Infeasible;
    EXPECT_THROW(extract_report(bad, s.model, p.instance, p.scenarios), SolveFailed);
    LpSolution tampered = s.solution;
    tampered.values[s.model.map.z(0)] += 10.0;
    EXPECT_THROW(extract_report(tampered, s.model, p.instance, p.scenarios), ConsistencyError);
}

TEST(Report, JsonHasNestedArrays) {
    const auto p = testkit::micro_problem();
    const auto json = report_to_json(report_of(p, FormulationConfig::risk_neutral()), p.instance);
    EXPECT_NE(json.find("\"objective_value\": 3500"), std::string::npos);
    EXPECT_NE(json.find("\"y_spot\""), std::string::npos);
    EXPECT_EQ(format_sig9(1234567891234.0), "1.23456789e+12");
    EXPECT_EQ(format_sig9(0.1 + 0.2), "0.3");
}

TEST(Builder, SideConstraintHook) {
    const auto p = testkit::micro_problem(50, 20);
    BuildOptions opts;
    opts.side_constraints = [](LinearProgram& lp, const VariableMap& map) {
        lp.add_row("min_contract", {{map.xmin(0, 0), 1.0}}, Relation::GreaterEqual, 40.0);
    };
    auto s = run(p, FormulationConfig::risk_neutral(), opts);
    const auto r = extract_report(s.solution, s.model, p.instance, p.scenarios);
    EXPECT_NEAR(r.x_min(0, 0), 40, 1e-9);
    EXPECT_NEAR(r.objective_value(), micro_expected(60, 50, 20), 1e-6);
}
