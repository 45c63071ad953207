#pragma once

#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace portalloc {

/// Names of the long-format CSV columns holding timestamp, node id and price.
struct ColumnMap {
    std::string timestamp = "timestamp";
    std::string node = "node";
    std::string price = "price";

    /// Parses `timestamp=<name>,node=<name>,price=<name>`; omitted keys keep defaults.
    static ColumnMap parse(std::string_view spec);
    /// Column names of the real-time hourly LMP feed export.
    static ColumnMap pjm_rt_hourly();
};

struct IngestOptions {
    ColumnMap columns;
    /// Node id whose series is the system-wide price. Its column is removed
    /// from the nodal matrix.
    std::string system_node = "SYSTEM";
};

/// Wide price matrix: one row per timestamp, one column per node.
struct PriceHistory {
    std::vector<std::string> timestamps;
    std::vector<std::string> nodes;
    Eigen::MatrixXd nodal_prices;   ///< observations x nodes, $/MWh
    Eigen::VectorXd system_prices;  ///< one per observation (zeros when absent)
    bool has_system_price = false;

    std::size_t observations() const noexcept { return timestamps.size(); }

    /// Copy restricted to `ids`, in that order. Throws InvalidInput for unknown ids.
    PriceHistory select(std::span<const std::string> ids) const;
};

/// Reads long-format rows (timestamp, node, price) and pivots them.
/// Timestamps and nodes keep their order of first appearance.
/// Throws ParseError (with line number) for malformed or duplicate rows and
/// MissingObservation when a (timestamp, node) cell is absent.
PriceHistory parse_lmp_csv(std::istream& in, const IngestOptions& options = {});
PriceHistory ingest_lmp_csv(const std::filesystem::path& path, const IngestOptions& options = {});

}  // namespace portalloc
