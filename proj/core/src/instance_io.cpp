#include "portalloc/instance_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "portalloc/errors.hpp"

namespace portalloc {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

template <typename T>
T field(const json& obj, const char* key, const char* context) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw InvalidInput(std::string(context) + ": missing field '" + key + "'");
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string(context) + ": field '" + key + "' has wrong type (" + e.what() + ")");
    }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const char* context) {
    if (!obj.contains(key)) return fallback;
    return field<T>(obj, key, context);
}

std::vector<double> per_period(std::vector<double> values, std::size_t periods, const std::string& context) {
    if (values.size() == 1 && periods > 1) values.assign(periods, values.front());
    if (values.size() != periods) {
        throw InvalidInput(context + ": expected " + std::to_string(periods) + " per-period values, got " +
                           std::to_string(values.size()));
    }
    return values;
}

std::size_t market_or_throw(const MarketInstance& instance, const std::string& id, const char* context) {
    auto m = instance.market_index(id);
    if (!m) throw InvalidInput(std::string(context) + ": unknown market '" + id + "'");
    return *m;
}

}  // namespace

MarketInstance parse_instance(std::string_view json_text) {
    const json doc = parse_json(json_text, "instance");
    if (!doc.is_object()) throw InvalidInput("instance: document must be a JSON object");

    MarketInstance instance;
    instance.periods = field<std::size_t>(doc, "periods", "instance");
    for (const auto& id : field<std::vector<std::string>>(doc, "markets", "instance")) {
        instance.markets.push_back(Market{id, {}, 0.0, std::nullopt});
    }

    for (const auto& c : field_or<json>(doc, "contracts", json::array(), "instance")) {
        const auto m = market_or_throw(instance, field<std::string>(c, "market", "contract"), "contract");
        ContractSpec spec;
        json price = field<json>(c, "wholesale_price", "contract");
        std::vector<double> prices = price.is_number() ? std::vector<double>{price.get<double>()}
                                                       : field<std::vector<double>>(c, "wholesale_price", "contract");
        spec.wholesale_price = per_period(std::move(prices), instance.periods,
                                          "contract wholesale_price in market " + instance.markets[m].id);
        spec.max_volume = field<double>(c, "max_volume", "contract");
        spec.flex_above_min = field_or<double>(c, "flex_above_min", 0.0, "contract");
        instance.markets[m].contracts.push_back(std::move(spec));
    }

    for (const auto& step : field<json>(doc, "supply_steps", "instance")) {
        instance.supply_steps.push_back(
            {field<double>(step, "capacity", "supply_step"), field<double>(step, "unit_cost", "supply_step")});
    }

    if (doc.contains("transport_cost")) {
        for (const auto& [id, value] : doc.at("transport_cost").items()) {
            const auto m = market_or_throw(instance, id, "transport_cost");
            if (!value.is_number()) throw InvalidInput("transport_cost: value for '" + id + "' is not a number");
            instance.markets[m].transport_cost = value.get<double>();
        }
    }

    std::vector<ProductionLimit> limits;
    for (const auto& lim : field<json>(doc, "production_limits", "instance")) {
        limits.push_back({field<double>(lim, "lower", "production_limit"), field<double>(lim, "upper", "production_limit")});
    }
    if (limits.size() == 1 && instance.periods > 1) limits.assign(instance.periods, limits.front());
    if (limits.size() != instance.periods) {
        throw InvalidInput("production_limits: expected " + std::to_string(instance.periods) + " entries, got " +
                           std::to_string(limits.size()));
    }
    instance.production_limits = std::move(limits);

    if (doc.contains("elasticity")) {
        for (const auto& [id, rule] : doc.at("elasticity").items()) {
            const auto m = market_or_throw(instance, id, "elasticity");
            instance.markets[m].elasticity = ElasticityRule{field<std::size_t>(rule, "steps", "elasticity"),
                                                            field<double>(rule, "width", "elasticity"),
                                                            field_or<double>(rule, "decrement", 0.0, "elasticity")};
        }
    }
    return instance;
}

std::string instance_to_json(const MarketInstance& instance) {
    json doc;
    doc["markets"] = instance.market_ids();
    json contracts = json::array();
    json transport = json::object();
    json elasticity = json::object();
    for (const auto& market : instance.markets) {
        for (const auto& c : market.contracts) {
            contracts.push_back({{"market", market.id},
                                 {"wholesale_price", c.wholesale_price},
                                 {"max_volume", c.max_volume},
                                 {"flex_above_min", c.flex_above_min}});
        }
        transport[market.id] = market.transport_cost;
        if (market.elasticity) {
            elasticity[market.id] = {{"steps", market.elasticity->steps},
                                     {"width", market.elasticity->width},
                                     {"decrement", market.elasticity->decrement}};
        }
    }
    doc["contracts"] = std::move(contracts);
    json steps = json::array();
    for (const auto& s : instance.supply_steps) steps.push_back({{"capacity", s.capacity}, {"unit_cost", s.unit_cost}});
    doc["supply_steps"] = std::move(steps);
    doc["transport_cost"] = std::move(transport);
    json limits = json::array();
    for (const auto& l : instance.production_limits) limits.push_back({{"lower", l.lower}, {"upper", l.upper}});
    doc["production_limits"] = std::move(limits);
    doc["periods"] = instance.periods;
    if (!elasticity.empty()) doc["elasticity"] = std::move(elasticity);
    return doc.dump(2) + "\n";
}

ScenarioSet parse_scenarios(std::string_view json_text, const MarketInstance& instance) {
    const json doc = parse_json(json_text, "scenarios");
    if (!doc.is_object()) throw InvalidInput("scenarios: document must be a JSON object");

    auto probabilities = field<std::vector<double>>(doc, "probabilities", "scenarios");
    const json spot = field<json>(doc, "spot", "scenarios");
    if (!spot.is_array()) throw InvalidInput("scenarios: 'spot' must be an array");

    struct Entry {
        std::size_t m, k, t, s;
        double price, width;
    };
    std::vector<Entry> entries;
    entries.reserve(spot.size());
    std::vector<std::size_t> steps(instance.num_markets(), 0);
    for (const auto& e : spot) {
        Entry entry{market_or_throw(instance, field<std::string>(e, "market", "spot"), "spot"),
                    field<std::size_t>(e, "step", "spot"),
                    field<std::size_t>(e, "period", "spot"),
                    field<std::size_t>(e, "scenario", "spot"),
                    field<double>(e, "price", "spot"),
                    field<double>(e, "width", "spot")};
        if (entry.t >= instance.periods) {
            throw InvalidInput("spot: period " + std::to_string(entry.t) + " out of range");
        }
        if (entry.s >= probabilities.size()) {
            throw InvalidInput("spot: scenario " + std::to_string(entry.s) + " out of range");
        }
        steps[entry.m] = std::max(steps[entry.m], entry.k + 1);
        entries.push_back(entry);
    }
    for (std::size_t m = 0; m < instance.num_markets(); ++m) {
        if (const auto& rule = instance.markets[m].elasticity) {
            if (steps[m] > rule->steps) {
                throw InvalidInput("spot: step index exceeds elasticity rule in market " + instance.markets[m].id);
            }
            steps[m] = rule->steps;
        }
    }

    ScenarioSet scenarios(std::move(probabilities), instance.periods, std::move(steps));
    for (const auto& e : entries) {
        if (scenarios.is_set(e.m, e.k, e.t, e.s)) {
            throw InvalidInput("spot: duplicate entry for (market=" + instance.markets[e.m].id +
                               ",step=" + std::to_string(e.k) + ",period=" + std::to_string(e.t) +
                               ",scenario=" + std::to_string(e.s) + ")");
        }
        scenarios.set_step(e.m, e.k, e.t, e.s, e.price, e.width);
    }
    return scenarios;
}

std::string scenarios_to_json(const ScenarioSet& scenarios, const MarketInstance& instance) {
    json doc;
    doc["probabilities"] = scenarios.probabilities();
    json spot = json::array();
    for (std::size_t s = 0; s < scenarios.num_scenarios(); ++s) {
        for (std::size_t m = 0; m < scenarios.num_markets(); ++m) {
            for (std::size_t t = 0; t < scenarios.num_periods(); ++t) {
                for (std::size_t k = 0; k < scenarios.num_steps(m); ++k) {
                    if (!scenarios.is_set(m, k, t, s)) continue;
                    spot.push_back({{"market", instance.markets.at(m).id},
                                    {"step", k},
                                    {"period", t},
                                    {"scenario", s},
                                    {"price", scenarios.price(m, k, t, s)},
                                    {"width", scenarios.width(m, k, t, s)}});
                }
            }
        }
    }
    doc["spot"] = std::move(spot);
    return doc.dump(1) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MarketInstance load_instance(const std::filesystem::path& path) { return parse_instance(read_text_file(path)); }

ScenarioSet load_scenarios(const std::filesystem::path& path, const MarketInstance& instance) {
    return parse_scenarios(read_text_file(path), instance);
}

}  // namespace portalloc
