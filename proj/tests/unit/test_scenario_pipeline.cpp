#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "generators.hpp"
#include "portalloc/errors.hpp"
#include "portalloc/kmeans.hpp"
#include "portalloc/knee_point.hpp"
#include "portalloc/lmp_csv.hpp"
#include "portalloc/q_estimate.hpp"
#include "portalloc/scenario_builder.hpp"
#include "portalloc/validate.hpp"

using namespace portalloc;

namespace {

PriceHistory parse(const std::string& text, IngestOptions opts = {}) {
    std::istringstream in(text);
    return parse_lmp_csv(in, opts);
}

Eigen::MatrixXd rows(std::initializer_list<std::initializer_list<double>> data) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : data) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

double chord_distance(double x0, double y0, double x1, double y1, double x, double y) {
    return std::abs((x1 - x0) * (y - y0) - (y1 - y0) * (x - x0)) / std::hypot(x1 - x0, y1 - y0);
}

}  // namespace

TEST(Ingest, PivotsCompleteGrid) {
    const auto h = parse(
        "timestamp,node,price\n"
        "t1,A,10\nt1,B,11\n"
        "t2,B,21\nt2,A,20\n"
        "t3,A,30\nt3,B,31.5\n");
    ASSERT_EQ(h.nodal_prices.rows(), 3);
    ASSERT_EQ(h.nodal_prices.cols(), 2);
    EXPECT_EQ(h.nodes, (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(h.nodal_prices(1, 0), 20);
    EXPECT_EQ(h.nodal_prices(2, 1), 31.5);
    EXPECT_FALSE(h.has_system_price);
    EXPECT_EQ(h.system_prices.size(), 3);
}

TEST(Ingest, DuplicateNamesCellAndLine) {
    try {
        parse("timestamp,node,price\nt1,A,1\nt1,B,2\nt1,A,3\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_NE(std::string(e.what()).find("timestamp=t1, node=A"), std::string::npos);
    }
}

TEST(Ingest, MalformedRowsAndGaps) {
    try {
        parse("timestamp,node,price\nt1,A,1\nt1,B,abc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
    EXPECT_THROW(parse("timestamp,node,price\nt1,A\n"), ParseError);
    EXPECT_THROW(parse("time,node,price\nt1,A,1\n"), ParseError);
    EXPECT_THROW(parse("timestamp,node,price\nt1,A,1\nt1,B,2\nt2,A,3\n"), MissingObservation);
}

TEST(Ingest, PjmColumnsAndSystemNode) {
    IngestOptions opts;
    opts.columns = ColumnMap::pjm_rt_hourly();
    opts.system_node = "PJM-RTO";
    const auto h = parse(
        "datetime_beginning_utc,datetime_beginning_ept,pnode_id,pnode_name,total_lmp_rt\n"
        "x,1/1/2024 1:00,51291,\"AECO, ZONE\",25.5\n"
        "x,1/1/2024 1:00,PJM-RTO,RTO,24.0\n"
        "x,1/1/2024 2:00,51291,\"AECO, ZONE\",22.0\n"
        "x,1/1/2024 2:00,PJM-RTO,RTO,21.0\n",
        opts);
    EXPECT_EQ(h.nodes, std::vector<std::string>{"51291"});
    EXPECT_TRUE(h.has_system_price);
    EXPECT_EQ(h.system_prices[1], 21.0);
    EXPECT_EQ(h.nodal_prices(0, 0), 25.5);
}

TEST(Ingest, ColumnMapParsing) {
    const auto map = ColumnMap::parse("timestamp=ts, price=lmp");
    EXPECT_EQ(map.timestamp, "ts");
    EXPECT_EQ(map.node, "node");
    EXPECT_EQ(map.price, "lmp");
    EXPECT_THROW(ColumnMap::parse("zone=x"), InvalidInput);
    EXPECT_THROW(ColumnMap::parse("timestamp"), InvalidInput);
}

TEST(Ingest, SelectReordersAndChecks) {
    const auto h = parse("timestamp,node,price\nt1,A,1\nt1,B,2\n");
    const std::vector<std::string> ids{"B", "A"};
    const auto s = h.select(ids);
    EXPECT_EQ(s.nodal_prices(0, 0), 2);
    const std::vector<std::string> bad{"C"};
    EXPECT_THROW(h.select(bad), InvalidInput);
}

TEST(KMeans, SingletonClusters) {
    const auto x = rows({{0, 0}, {5, 1}, {2, 9}, {7, 7}});
    const auto r = kmeans_reduce(x, 4);
    std::vector<std::size_t> reps = r.representatives;
    std::sort(reps.begin(), reps.end());
    EXPECT_EQ(reps, (std::vector<std::size_t>{0, 1, 2, 3}));
    for (double p : r.probabilities) EXPECT_DOUBLE_EQ(p, 0.25);
    EXPECT_DOUBLE_EQ(r.inertia, 0.0);
}

TEST(KMeans, SingleClusterPicksSampleNearestMean) {
    const auto x = rows({{0, 0}, {4, 0}, {1, 1}, {10, 0}});  // mean (3.75, 0.25)
    const auto r = kmeans_reduce(x, 1);
    EXPECT_EQ(r.representatives[0], 1u);
    EXPECT_DOUBLE_EQ(r.probabilities[0], 1.0);
}

TEST(KMeans, ToyTwoClustersMatchExhaustivePartition) {
    const auto x = rows({{0, 0}, {0, 1}, {10, 10}, {10, 11}});
    // Exhaustive search over the 7 two-block partitions.
    double best = kInfinity;
    unsigned best_mask = 0;
    for (unsigned mask = 1; mask < 8; ++mask) {
        double wcss = 0;
        for (int side = 0; side < 2; ++side) {
            Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
            int count = 0;
            for (int i = 0; i < 4; ++i) {
                if (((mask >> i) & 1u) == static_cast<unsigned>(side)) {
                    mean += x.row(i);
                    ++count;
                }
            }
            mean /= count;
            for (int i = 0; i < 4; ++i) {
                if (((mask >> i) & 1u) == static_cast<unsigned>(side)) wcss += (x.row(i) - mean).squaredNorm();
            }
        }
        if (wcss < best) {
            best = wcss;
            best_mask = mask;
        }
    }
    EXPECT_EQ(best_mask & 3u, (best_mask & 1u) ? 3u : 0u);

    for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
        const auto r = kmeans_reduce(x, 2, {seed, 300});
        EXPECT_EQ(r.assignment[0], r.assignment[1]);
        EXPECT_EQ(r.assignment[2], r.assignment[3]);
        EXPECT_NE(r.assignment[0], r.assignment[2]);
        EXPECT_NEAR(r.inertia, best, 1e-12);
        EXPECT_DOUBLE_EQ(r.probabilities[0], 0.5);
        EXPECT_DOUBLE_EQ(r.probabilities[1], 0.5);
        // Both members are equidistant from their centroid; the lower row wins.
        EXPECT_EQ(r.representatives[r.assignment[0]], 0u);
        EXPECT_EQ(r.representatives[r.assignment[2]], 2u);
    }
}

TEST(KMeans, RejectsBadK) {
    const auto x = rows({{0}, {1}});
    EXPECT_THROW(kmeans_reduce(x, 0), ParameterOutOfRange);
    EXPECT_THROW(kmeans_reduce(x, 3), ParameterOutOfRange);
}

TEST(KMeans, DuplicatePointsForceReseed) {
    const auto x = rows({{1, 1}, {1, 1}, {1, 1}, {5, 5}});
    const auto r = kmeans_reduce(x, 3);
    for (auto size : r.cluster_sizes) EXPECT_GT(size, 0u);
    double total = 0;
    for (double p : r.probabilities) total += p;
    EXPECT_DOUBLE_EQ(total, 1.0);
}

TEST(KMeansProperty, DeterministicAndMeanPreserving) {
    testkit::Rng rng(41);
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = testkit::uniform_int(rng, 3, 60);
        const auto d = testkit::uniform_int(rng, 1, 4);
        Eigen::MatrixXd x(n, d);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < d; ++j) x(i, j) = testkit::uniform(rng, -50, 50);
        const auto k = static_cast<std::size_t>(testkit::uniform_int(rng, 1, n));
        const std::uint64_t seed = rng();
        const auto a = kmeans_reduce(x, k, {seed, 300});
        const auto b = kmeans_reduce(x, k, {seed, 300});
        EXPECT_EQ(a.assignment, b.assignment);
        EXPECT_EQ(a.representatives, b.representatives);

        Eigen::RowVectorXd weighted = Eigen::RowVectorXd::Zero(d);
        double radius = 0;
        for (std::size_t s = 0; s < a.k(); ++s) {
            weighted += a.probabilities[s] * x.row(static_cast<Eigen::Index>(a.representatives[s]));
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            radius = std::max(radius, (x.row(i) - a.centroids.row(static_cast<Eigen::Index>(a.assignment[i]))).norm());
        }
        EXPECT_LE((weighted - x.colwise().mean()).norm(), radius + 1e-9);
        std::size_t total = 0;
        for (auto s : a.cluster_sizes) total += s;
        EXPECT_EQ(total, static_cast<std::size_t>(n));
    }
}

TEST(InertiaCurve, NonIncreasing) {
    testkit::Rng rng(42);
    Eigen::MatrixXd x(30, 2);
    for (Eigen::Index i = 0; i < 30; ++i) x.row(i) << testkit::uniform(rng, 0, 10), testkit::uniform(rng, 0, 10);
    const auto curve = inertia_curve(x, 1, 8);
    ASSERT_EQ(curve.size(), 8u);
    for (std::size_t i = 1; i < curve.size(); ++i) EXPECT_LE(curve[i].inertia, curve[i - 1].inertia);
}

TEST(Knee, ExamplesMatchChordDistances) {
    const std::vector<InertiaPoint> curve{{1, 100}, {2, 50}, {3, 10}, {4, 8}, {5, 7}};
    std::size_t expected = 0;
    double best = -1;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double d = chord_distance(1, 100, 5, 7, static_cast<double>(curve[i].k), curve[i].inertia);
        if (d > best) {
            best = d;
            expected = curve[i].k;
        }
    }
    EXPECT_EQ(expected, 3u);
    EXPECT_EQ(knee_point(curve).k, 3u);

    const std::vector<InertiaPoint> elbow{{1, 10}, {2, 2}, {3, 1.9}, {4, 1.8}};
    EXPECT_EQ(knee_point(elbow).k, 2u);
}

TEST(Knee, LinearAndDegenerate) {
    const std::vector<InertiaPoint> linear{{1, 9}, {2, 7}, {3, 5}, {4, 3}, {5, 1}};
    EXPECT_EQ(knee_point(linear).k, 2u);
    const std::vector<InertiaPoint> linear_frac{{2, 0.9}, {4, 0.6}, {6, 0.3}, {8, 0.0}};
    EXPECT_EQ(knee_point(linear_frac).k, 4u);
    const std::vector<InertiaPoint> flat{{1, 4}, {2, 4}, {3, 4}};
    const auto r = knee_point(flat);
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.k, 1u);
}

TEST(Knee, Preconditions) {
    EXPECT_THROW(knee_point(std::vector<InertiaPoint>{{1, 3}, {2, 1}}), InvalidInput);
    EXPECT_THROW(knee_point(std::vector<InertiaPoint>{{1, 3}, {1, 2}, {3, 1}}), InvalidInput);
    EXPECT_THROW(knee_point(std::vector<InertiaPoint>{{1, 3}, {2, 4}, {3, 1}}), InvalidInput);
}

TEST(Cholesky, HandcraftedTwoByTwo) {
    Eigen::Matrix2d sigma;
    sigma << 4, 2, 2, 3;
    const auto r = cholesky_with_jitter(sigma);
    EXPECT_EQ(r.jitter, 0.0);
    EXPECT_NEAR(r.lower(0, 0), 2, 1e-12);
    EXPECT_NEAR(r.lower(0, 1), 0, 1e-12);
    EXPECT_NEAR(r.lower(1, 0), 1, 1e-12);
    EXPECT_NEAR(r.lower(1, 1), std::sqrt(2.0), 1e-12);
}

TEST(Cholesky, RejectsAsymmetricAndIndefinite) {
    Eigen::Matrix2d asym;
    asym << 1, 0.5, 0, 1;
    EXPECT_THROW(cholesky_with_jitter(asym), InvalidInput);
    Eigen::Matrix2d indefinite;
    indefinite << 1, 0, 0, -5;
    EXPECT_THROW(cholesky_with_jitter(indefinite), NumericalFailure);
}

TEST(CholeskyProperty, RoundTripRandomPsd) {
    testkit::Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const auto n = static_cast<std::size_t>(testkit::uniform_int(rng, 1, 10));
        const auto rank = static_cast<std::size_t>(testkit::uniform_int(rng, 1, static_cast<int>(n)));
        const auto sigma = testkit::random_psd(rng, n, rank);
        const auto r = cholesky_with_jitter(sigma);
        const double err = (r.lower * r.lower.transpose() - sigma).norm();
        EXPECT_LE(err, r.jitter * std::sqrt(static_cast<double>(n)) + 1e-8 * sigma.norm());
        EXPECT_TRUE(r.lower.isLowerTriangular());
    }
}

TEST(EstimateQ, DeviationCovariance) {
    // Deviations chosen so the sample covariance is [[4,2],[2,3]].
    PriceHistory h;
    h.nodes = {"A", "B"};
    const double a = std::sqrt(3.0);
    const double c = std::sqrt(1.5);
    Eigen::MatrixXd dev(4, 2);
    // u = a(1,-1,1,-1), v = u/2 + c(1,1,-1,-1): sum u^2 = 12, sum uv = 6, sum v^2 = 9 (divisor 3).
    dev << a, 0.5 * a + c, -a, -0.5 * a + c, a, 0.5 * a - c, -a, -0.5 * a - c;
    Eigen::MatrixXd cov_check = dev.transpose() * dev / 3.0;
    ASSERT_NEAR(cov_check(0, 0), 4, 1e-12);
    ASSERT_NEAR(cov_check(0, 1), 2, 1e-12);
    ASSERT_NEAR(cov_check(1, 1), 3, 1e-12);
    h.system_prices = Eigen::Vector4d(30, 31, 29, 33);
    h.nodal_prices = dev.colwise() + h.system_prices;
    h.timestamps = {"1", "2", "3", "4"};
    const auto q = estimate_q(h);
    EXPECT_EQ(q.jitter, 0.0);
    EXPECT_NEAR(q.q(0, 0), 2, 1e-12);
    EXPECT_NEAR(q.q(1, 0), 1, 1e-12);
    EXPECT_NEAR(q.q(1, 1), std::sqrt(2.0), 1e-12);
    EXPECT_EQ(q.q(0, 1), 0.0);
    EXPECT_NEAR(q.q_vector[0], 30.75, 1e-12);
}

TEST(EstimateQ, SingleMarketIsStandardDeviation) {
    PriceHistory h;
    h.nodes = {"A"};
    h.timestamps = {"1", "2", "3"};
    h.nodal_prices = Eigen::Vector3d(10, 12, 17);
    h.system_prices = Eigen::Vector3d::Zero();
    const auto q = estimate_q(h);
    const double mean = 13.0;
    const double var = ((10 - mean) * (10 - mean) + (12 - mean) * (12 - mean) + (17 - mean) * (17 - mean)) / 2.0;
    EXPECT_NEAR(q.q(0, 0), std::sqrt(var), 1e-12);
    // ||Q^T y||_1 = sigma * |y| in one dimension.
    EXPECT_NEAR((q.q.transpose() * Eigen::VectorXd::Constant(1, -3.0)).lpNorm<1>(), 3.0 * std::sqrt(var), 1e-12);
}

TEST(EstimateQ, RankOneTakesJitterPath) {
    PriceHistory h;
    h.nodes = {"A", "B", "C"};
    h.timestamps = {"1", "2", "3", "4", "5"};
    const Eigen::VectorXd base = (Eigen::VectorXd(5) << 1, 4, 2, 8, 5).finished();
    h.nodal_prices.resize(5, 3);
    for (int j = 0; j < 3; ++j) h.nodal_prices.col(j) = base;
    h.system_prices = Eigen::VectorXd::Zero(5);
    const auto q = estimate_q(h);
    EXPECT_GT(q.jitter, 0.0);
    EXPECT_LE(q.residual, q.jitter * std::sqrt(3.0) * (1 + 1e-9));
    EXPECT_NEAR(q.residual, (q.q * q.q.transpose() - q.sigma).norm(), 1e-15);
}

TEST(EstimateQ, NeedsEnoughObservations) {
    PriceHistory h;
    h.nodes = {"A", "B"};
    h.timestamps = {"1", "2"};
    h.nodal_prices = Eigen::Matrix2d::Identity();
    h.system_prices = Eigen::Vector2d::Zero();
    EXPECT_THROW(estimate_q(h), InvalidInput);
}

TEST(QJson, RoundTripAndPermutation) {
    Eigen::Matrix2d q;
    q << 2, 0, 1, std::sqrt(2.0);
    const std::vector<std::string> names{"A", "B"};
    const auto text = q_to_json(names, q);
    EXPECT_EQ(parse_q_json(text, names), Eigen::MatrixXd(q));
    const std::vector<std::string> swapped{"B", "A"};
    const auto p = parse_q_json(text, swapped);
    Eigen::Vector2d y(3, -1);                     // in swapped order
    Eigen::Vector2d y_orig(y[1], y[0]);           // in file order
    EXPECT_NEAR((p.transpose() * y).lpNorm<1>(), (q.transpose() * y_orig).lpNorm<1>(), 1e-12);
    EXPECT_EQ(parse_q_json(R"({"markets": ["A","B"], "q": [[2],[1, 1.5]]})", names)(1, 1), 1.5);
    EXPECT_THROW(parse_q_json(R"({"markets": ["A"], "q": [[1]]})", names), DimensionMismatch);
    EXPECT_THROW(parse_q_json("[]", names), ParseError);
}

TEST(ScenarioBuilder, StaircaseFromRepresentatives) {
    auto p = testkit::micro_problem();
    p.instance.markets[0].elasticity = ElasticityRule{3, 25.0, 0.2};
    const Eigen::MatrixXd top = rows({{40.0}, {31.0}});
    const std::vector<std::size_t> sizes{3, 1};
    const auto s = build_scenarios(p.instance, top, sizes);
    EXPECT_DOUBLE_EQ(s.probability(0), 0.75);
    EXPECT_DOUBLE_EQ(s.probability(1), 0.25);
    EXPECT_EQ(s.num_steps(0), 3u);
    EXPECT_NEAR(s.price(0, 2, 0, 0), 39.6, 1e-12);
    EXPECT_EQ(s.width(0, 1, 0, 1), 25.0);
    EXPECT_TRUE(validate_instance(p.instance, s).empty());

    p.instance.markets[0].elasticity.reset();
    const auto plain = build_scenarios(p.instance, top, sizes);
    EXPECT_EQ(plain.num_steps(0), 1u);
    EXPECT_EQ(plain.width(0, 0, 0, 0), 100.0);
}

TEST(ScenarioBuilderProperty, PipelinePassesValidation) {
    testkit::Rng rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = testkit::random_problem(rng);
        for (auto& market : p.instance.markets) market.elasticity = ElasticityRule{2, 30.0, 0.5};
        const auto m = static_cast<Eigen::Index>(p.instance.num_markets());
        const Eigen::Index n = testkit::uniform_int(rng, 3, 40);
        PriceHistory h;
        h.nodal_prices.resize(n, m);
        for (Eigen::Index i = 0; i < n; ++i) {
            h.timestamps.push_back(std::to_string(i));
            for (Eigen::Index j = 0; j < m; ++j) h.nodal_prices(i, j) = testkit::uniform(rng, 10, 90);
        }
        const auto r = kmeans_reduce(h, static_cast<std::size_t>(testkit::uniform_int(rng, 1, static_cast<int>(n))));
        const auto s = build_scenarios(p.instance, h, r);
        EXPECT_TRUE(validate_instance(p.instance, s).empty());
    }
}
