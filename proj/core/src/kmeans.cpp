#include "portalloc/kmeans.hpp"

#include <limits>
#include <random>

#include "portalloc/errors.hpp"

namespace portalloc {
namespace {

using Index = Eigen::Index;

double squared_distance(const Eigen::MatrixXd& a, Index i, const Eigen::MatrixXd& b, Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

Eigen::MatrixXd farthest_point_seeds(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed) {
    const Index n = x.rows();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    Eigen::MatrixXd centers(static_cast<Index>(k), x.cols());
    centers.row(0) = x.row(pick(rng));
    Eigen::VectorXd nearest(n);
    for (Index i = 0; i < n; ++i) nearest[i] = squared_distance(x, i, centers, 0);
    for (Index c = 1; c < static_cast<Index>(k); ++c) {
        Index best = 0;
        for (Index i = 1; i < n; ++i) {
            if (nearest[i] > nearest[best]) best = i;
        }
        centers.row(c) = x.row(best);
        for (Index i = 0; i < n; ++i) nearest[i] = std::min(nearest[i], squared_distance(x, i, centers, c));
    }
    return centers;
}

// Nearest centroid, ties to the lowest cluster index.
std::size_t nearest_centroid(const Eigen::MatrixXd& x, Index i, const Eigen::MatrixXd& centers) {
    std::size_t best = 0;
    double best_d = squared_distance(x, i, centers, 0);
    for (Index c = 1; c < centers.rows(); ++c) {
        const double d = squared_distance(x, i, centers, c);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::size_t>(c);
        }
    }
    return best;
}

}  // namespace

KMeansResult kmeans_reduce(const Eigen::MatrixXd& x, std::size_t k, const KMeansOptions& options) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (n == 0 || x.cols() == 0) throw InvalidInput("k-means needs at least one observation and one coordinate");
    if (k < 1 || k > n) {
        throw ParameterOutOfRange("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    }
    if (!x.allFinite()) throw InvalidInput("k-means observations contain non-finite values");

    KMeansResult r;
    r.centroids = farthest_point_seeds(x, k, options.seed);
    r.assignment.assign(n, std::numeric_limits<std::size_t>::max());
    r.cluster_sizes.assign(k, 0);

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        bool changed = false;
        std::fill(r.cluster_sizes.begin(), r.cluster_sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = nearest_centroid(x, static_cast<Index>(i), r.centroids);
            if (c != r.assignment[i]) changed = true;
            r.assignment[i] = c;
            ++r.cluster_sizes[c];
        }
        // Empty cluster: move the point farthest from its own centroid (in a
        // cluster of size > 1) into it.
        for (std::size_t c = 0; c < k; ++c) {
            if (r.cluster_sizes[c] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (r.cluster_sizes[r.assignment[i]] < 2) continue;
                const double d = squared_distance(x, static_cast<Index>(i), r.centroids,
                                                  static_cast<Index>(r.assignment[i]));
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) break;  // k <= n guarantees this is unreachable
            --r.cluster_sizes[r.assignment[far]];
            r.assignment[far] = c;
            r.cluster_sizes[c] = 1;
            ++r.reseeds;
            changed = true;
        }
        r.iterations = iter + 1;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Index>(k), x.cols());
        for (std::size_t i = 0; i < n; ++i) sums.row(static_cast<Index>(r.assignment[i])) += x.row(static_cast<Index>(i));
        for (std::size_t c = 0; c < k; ++c) {
            r.centroids.row(static_cast<Index>(c)) = sums.row(static_cast<Index>(c)) / static_cast<double>(r.cluster_sizes[c]);
        }
        if (!changed) {
            r.converged = true;
            break;
        }
    }

    r.representatives.assign(k, n);
    std::vector<double> rep_d(k, std::numeric_limits<double>::infinity());
    r.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = r.assignment[i];
        const double d = squared_distance(x, static_cast<Index>(i), r.centroids, static_cast<Index>(c));
        r.inertia += d;
        if (d < rep_d[c]) {
            rep_d[c] = d;
            r.representatives[c] = i;
        }
    }
    r.probabilities.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        r.probabilities[c] = static_cast<double>(r.cluster_sizes[c]) / static_cast<double>(n);
    }
    return r;
}

KMeansResult kmeans_reduce(const PriceHistory& history, std::size_t k, const KMeansOptions& options) {
    return kmeans_reduce(history.nodal_prices, k, options);
}

std::vector<InertiaPoint> inertia_curve(const Eigen::MatrixXd& observations, std::size_t k_min, std::size_t k_max,
                                        const KMeansOptions& options) {
    if (k_min < 1 || k_min > k_max) throw ParameterOutOfRange("inertia curve needs 1 <= k_min <= k_max");
    std::vector<InertiaPoint> curve;
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t k = k_min; k <= k_max; ++k) {
        running = std::min(running, kmeans_reduce(observations, k, options).inertia);
        curve.push_back({k, running});
    }
    return curve;
}

}  // namespace portalloc
