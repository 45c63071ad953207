#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "portalloc/lmp_csv.hpp"

namespace portalloc {

struct KMeansOptions {
    std::uint64_t seed = 0;
    std::size_t max_iterations = 300;
};

/// Result of a k-means reduction. Clusters are indexed 0..k-1; cluster j
/// becomes scenario j.
struct KMeansResult {
    Eigen::MatrixXd centroids;                  ///< k x dim
    std::vector<std::size_t> assignment;        ///< cluster of each observation
    std::vector<std::size_t> cluster_sizes;
    std::vector<std::size_t> representatives;   ///< observation row nearest each centroid
    std::vector<double> probabilities;          ///< cluster_size / n
    double inertia = 0.0;                       ///< within-cluster sum of squared distances
    std::size_t iterations = 0;
    std::size_t reseeds = 0;                    ///< empty clusters moved to the farthest point
    bool converged = false;

    std::size_t k() const noexcept { return cluster_sizes.size(); }
};

/// Lloyd iterations from farthest-point seeding. The first seed is a uniform
/// draw from mt19937_64(seed); later seeds are the points farthest from the
/// chosen ones (ties to the lowest row). Requires 1 <= k <= rows.
KMeansResult kmeans_reduce(const Eigen::MatrixXd& observations, std::size_t k, const KMeansOptions& options = {});
KMeansResult kmeans_reduce(const PriceHistory& history, std::size_t k, const KMeansOptions& options = {});

struct InertiaPoint {
    std::size_t k = 0;
    double inertia = 0.0;
};

/// Inertia of kmeans_reduce for every k in [k_min, k_max], made non-increasing
/// by carrying the running minimum forward (Lloyd is only a local method).
std::vector<InertiaPoint> inertia_curve(const Eigen::MatrixXd& observations, std::size_t k_min, std::size_t k_max,
                                        const KMeansOptions& options = {});

}  // namespace portalloc
