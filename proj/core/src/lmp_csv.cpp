#include "portalloc/lmp_csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <unordered_map>

#include "portalloc/errors.hpp"

namespace portalloc {
namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                current += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += ch;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", line_no);
    fields.push_back(trim(current));
    return fields;
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("header has no column named '" + name + "'", 1);
}

}  // namespace

ColumnMap ColumnMap::parse(std::string_view spec) {
    ColumnMap map;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const auto end = std::min(spec.find(',', pos), spec.size());
        const auto item = trim(spec.substr(pos, end - pos));
        pos = end + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InvalidInput("column mapping '" + item + "' is not key=name");
        const auto key = trim(std::string_view(item).substr(0, eq));
        const auto value = trim(std::string_view(item).substr(eq + 1));
        if (value.empty()) throw InvalidInput("column mapping for '" + key + "' is empty");
        if (key == "timestamp") {
            map.timestamp = value;
        } else if (key == "node") {
            map.node = value;
        } else if (key == "price") {
            map.price = value;
        } else {
            throw InvalidInput("unknown column mapping key '" + key + "'");
        }
    }
    return map;
}

ColumnMap ColumnMap::pjm_rt_hourly() { return {"datetime_beginning_ept", "pnode_id", "total_lmp_rt"}; }

PriceHistory PriceHistory::select(std::span<const std::string> ids) const {
    PriceHistory out;
    out.timestamps = timestamps;
    out.system_prices = system_prices;
    out.has_system_price = has_system_price;
    out.nodal_prices.resize(nodal_prices.rows(), static_cast<Eigen::Index>(ids.size()));
    for (std::size_t j = 0; j < ids.size(); ++j) {
        const auto it = std::find(nodes.begin(), nodes.end(), ids[j]);
        if (it == nodes.end()) throw InvalidInput("price history has no node '" + ids[j] + "'");
        out.nodal_prices.col(static_cast<Eigen::Index>(j)) = nodal_prices.col(it - nodes.begin());
        out.nodes.push_back(ids[j]);
    }
    return out;
}

PriceHistory parse_lmp_csv(std::istream& in, const IngestOptions& options) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split_csv_line(line, line_no);
            break;
        }
    }
    if (header.empty()) throw ParseError("CSV is empty");
    const auto ts_col = find_column(header, options.columns.timestamp);
    const auto node_col = find_column(header, options.columns.node);
    const auto price_col = find_column(header, options.columns.price);
    const auto needed = std::max({ts_col, node_col, price_col}) + 1;

    std::vector<std::string> timestamps;
    std::vector<std::string> nodes;
    std::unordered_map<std::string, std::size_t> ts_index;
    std::unordered_map<std::string, std::size_t> node_index;
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, std::size_t>> cells;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() < needed) {
            throw ParseError("expected at least " + std::to_string(needed) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        const auto& ts = fields[ts_col];
        const auto& node = fields[node_col];
        const auto& price_text = fields[price_col];
        if (ts.empty() || node.empty()) throw ParseError("empty timestamp or node id", line_no);
        double price = 0.0;
        const auto [ptr, ec] = std::from_chars(price_text.data(), price_text.data() + price_text.size(), price);
        if (ec != std::errc() || ptr != price_text.data() + price_text.size()) {
            throw ParseError("price '" + price_text + "' is not a number", line_no);
        }
        auto [ts_it, ts_new] = ts_index.try_emplace(ts, timestamps.size());
        if (ts_new) timestamps.push_back(ts);
        auto [node_it, node_new] = node_index.try_emplace(node, nodes.size());
        if (node_new) nodes.push_back(node);
        const auto key = std::make_pair(ts_it->second, node_it->second);
        if (const auto found = cells.find(key); found != cells.end()) {
            throw ParseError("duplicate observation for (timestamp=" + ts + ", node=" + node +
                                 "), first seen on line " + std::to_string(found->second.second),
                             line_no);
        }
        cells.emplace(key, std::make_pair(price, line_no));
    }
    if (timestamps.empty()) throw ParseError("CSV has a header but no data rows", line_no);

    PriceHistory history;
    history.timestamps = timestamps;
    std::optional<std::size_t> system_col;
    if (const auto it = node_index.find(options.system_node); it != node_index.end()) system_col = it->second;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j != system_col) history.nodes.push_back(nodes[j]);
    }
    history.nodal_prices.resize(static_cast<Eigen::Index>(timestamps.size()),
                                static_cast<Eigen::Index>(history.nodes.size()));
    history.system_prices = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(timestamps.size()));
    history.has_system_price = system_col.has_value();

    for (std::size_t r = 0; r < timestamps.size(); ++r) {
        Eigen::Index out_col = 0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            const auto it = cells.find({r, j});
            if (it == cells.end()) {
                throw MissingObservation("no price for node '" + nodes[j] + "' at timestamp '" + timestamps[r] + "'");
            }
            if (j == system_col) {
                history.system_prices[static_cast<Eigen::Index>(r)] = it->second.first;
            } else {
                history.nodal_prices(static_cast<Eigen::Index>(r), out_col++) = it->second.first;
            }
        }
    }
    return history;
}

PriceHistory ingest_lmp_csv(const std::filesystem::path& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse_lmp_csv(in, options);
}

}  // namespace portalloc
