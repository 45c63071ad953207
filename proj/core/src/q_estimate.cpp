#include "portalloc/q_estimate.hpp"

#include <cmath>

#include <json.hpp>

#include "portalloc/errors.hpp"
#include "portalloc/instance_io.hpp"

namespace portalloc {
namespace {

constexpr double kPivotRatio = 1e-13;
constexpr int kMaxDoublings = 20;

bool try_cholesky(const Eigen::MatrixXd& a, double max_diag, Eigen::MatrixXd& lower) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) return false;
    lower = llt.matrixL();
    if (!lower.allFinite()) return false;
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        if (lower(i, i) * lower(i, i) <= kPivotRatio * max_diag) return false;
    }
    return true;
}

}  // namespace

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& sigma) {
    const auto n = sigma.rows();
    if (n == 0 || sigma.cols() != n) throw InvalidInput("covariance matrix must be square and non-empty");
    if (!sigma.allFinite()) throw InvalidInput("covariance matrix has non-finite entries");
    const double scale = std::max(1.0, sigma.cwiseAbs().maxCoeff());
    if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw InvalidInput("covariance matrix is not symmetric");
    }
    const double max_diag = sigma.diagonal().maxCoeff();
    CholeskyResult r;
    if (max_diag > 0.0 && try_cholesky(sigma, max_diag, r.lower)) return r;

    double delta = sigma.trace() / static_cast<double>(n) * 1e-10;
    // An all-zero matrix has no scale to borrow.
    if (!(delta > 0.0)) delta = 1e-10;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
    for (int d = 0; d <= kMaxDoublings; ++d, delta *= 2.0) {
        ++r.attempts;
        const Eigen::MatrixXd repaired = sigma + delta * identity;
        if (try_cholesky(repaired, repaired.diagonal().maxCoeff(), r.lower)) {
            r.jitter = delta;
            return r;
        }
    }
    throw NumericalFailure("covariance matrix is not positive semidefinite; Cholesky failed after " +
                           std::to_string(kMaxDoublings) + " jitter doublings");
}

Eigen::MatrixXd price_deviations(const PriceHistory& history) {
    if (history.system_prices.size() != history.nodal_prices.rows()) {
        throw DimensionMismatch("system price series length differs from the nodal price rows");
    }
    return history.nodal_prices.colwise() - history.system_prices;
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) throw InvalidInput("sample covariance needs at least two observations");
    const Eigen::MatrixXd centered = rows.rowwise() - rows.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(rows.rows() - 1);
    return (cov + cov.transpose()) * 0.5;
}

QEstimate estimate_q(const PriceHistory& history) {
    const auto m = static_cast<std::size_t>(history.nodal_prices.cols());
    if (m == 0) throw InvalidInput("price history has no market columns");
    if (history.observations() < m + 1) {
        throw InvalidInput("estimating Q for " + std::to_string(m) + " markets needs at least " +
                           std::to_string(m + 1) + " observations, got " +
                           std::to_string(history.observations()));
    }
    QEstimate e;
    e.markets = history.nodes;
    e.sigma = sample_covariance(price_deviations(history));
    const auto chol = cholesky_with_jitter(e.sigma);
    e.q = chol.lower;
    e.jitter = chol.jitter;
    e.residual = (e.q * e.q.transpose() - e.sigma).norm();
    e.q_vector = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(m), history.system_prices.mean());
    return e;
}

std::string q_to_json(std::span<const std::string> markets, const Eigen::MatrixXd& q) {
    if (q.rows() != q.cols() || static_cast<std::size_t>(q.rows()) != markets.size()) {
        throw DimensionMismatch("Q must be square with one row per market");
    }
    nlohmann::json doc;
    doc["markets"] = std::vector<std::string>(markets.begin(), markets.end());
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < q.cols(); ++j) row.push_back(q(i, j));
        rows.push_back(std::move(row));
    }
    doc["q"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string q_to_json(const QEstimate& estimate) { return q_to_json(estimate.markets, estimate.q); }

Eigen::MatrixXd parse_q_json(std::string_view json_text, std::span<const std::string> markets) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("Q document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("markets") || !doc.contains("q")) {
        throw ParseError("Q document must have 'markets' and 'q'");
    }
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    try {
        names = doc.at("markets").get<std::vector<std::string>>();
        rows = doc.at("q").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("Q document: ") + e.what());
    }
    const auto n = names.size();
    if (rows.size() != n) throw DimensionMismatch("Q has " + std::to_string(rows.size()) + " rows for " +
                                                  std::to_string(n) + " markets");
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() > n || rows[i].size() < i + 1) {
            throw DimensionMismatch("Q row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                                    " entries");
        }
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (!std::isfinite(rows[i][j])) throw InvalidInput("Q has a non-finite entry");
            q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    if (markets.size() != n) {
        throw DimensionMismatch("Q covers " + std::to_string(n) + " markets, instance has " +
                                std::to_string(markets.size()));
    }
    Eigen::MatrixXd out(q.rows(), q.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const auto it = std::find(names.begin(), names.end(), markets[i]);
        if (it == names.end()) throw DimensionMismatch("Q has no row for market '" + markets[i] + "'");
        out.row(static_cast<Eigen::Index>(i)) = q.row(it - names.begin());
    }
    return out;
}

Eigen::MatrixXd load_q(const std::filesystem::path& path, std::span<const std::string> markets) {
    return parse_q_json(read_text_file(path), markets);
}

}  // namespace portalloc
