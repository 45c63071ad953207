#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "portalloc/lmp_csv.hpp"

namespace portalloc {

struct CholeskyResult {
    Eigen::MatrixXd lower;     ///< L with L L^T = sigma + jitter * I
    double jitter = 0.0;       ///< 0 when no repair was needed
    std::size_t attempts = 1;  ///< factorizations tried
};

/// Cholesky factor of a symmetric PSD matrix. When the factorization fails or
/// a pivot falls below 1e-13 of the largest diagonal entry, adds delta*I
/// starting at 1e-10*trace/n and doubling, at most 20 doublings.
/// Throws NumericalFailure when that is not enough, InvalidInput when the
/// matrix is not square, symmetric or finite.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& sigma);

struct QEstimate {
    std::vector<std::string> markets;
    Eigen::MatrixXd sigma;     ///< sample covariance of p_m - p_sys, divisor n-1
    Eigen::MatrixXd q;         ///< lower triangular
    Eigen::VectorXd q_vector;  ///< mean system price times ones; informational
    double jitter = 0.0;
    double residual = 0.0;     ///< ||Q Q^T - sigma||_F
};

/// Deviations p_m - p_sys, one row per observation.
Eigen::MatrixXd price_deviations(const PriceHistory& history);
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows);

/// Needs at least markets + 1 observations.
QEstimate estimate_q(const PriceHistory& history);

/// `{ "markets": [...], "q": [[...], ...] }`, full square rows, zeros above the diagonal.
std::string q_to_json(const QEstimate& estimate);
std::string q_to_json(std::span<const std::string> markets, const Eigen::MatrixXd& q);

/// Reads a Q document and returns it in the order of `markets`. Rows may be
/// ragged (lower-triangular only). A permuted market list permutes the rows,
/// which leaves ||Q^T y||_1 unchanged for y in instance order.
Eigen::MatrixXd parse_q_json(std::string_view json_text, std::span<const std::string> markets);
Eigen::MatrixXd load_q(const std::filesystem::path& path, std::span<const std::string> markets);

}  // namespace portalloc
