#include "portalloc/cli.hpp"

#include <filesystem>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "portalloc/errors.hpp"
#include "portalloc/instance_io.hpp"
#include "portalloc/pipeline.hpp"
#include "portalloc/q_estimate.hpp"
#include "portalloc/report.hpp"
#include "portalloc/risk_metrics.hpp"
#include "portalloc/sweep.hpp"
#include "portalloc/validate.hpp"

namespace portalloc::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

class ValidationFailed : public InvalidInput {
public:
    explicit ValidationFailed(std::vector<Violation> v)
        : InvalidInput(v.empty() ? "validation failed" : v.front().message), violations(std::move(v)) {}
    std::vector<Violation> violations;
};

json violations_json(const std::vector<Violation>& violations) {
    auto arr = json::array();
    for (const auto& v : violations) arr.push_back({{"code", v.code}, {"message", v.message}});
    return arr;
}

template <class T>
void read_key(const nlohmann::json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

template <class T>
void read_key(const nlohmann::json& doc, const char* key, std::optional<T>& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

std::optional<std::size_t> parse_k(const std::string& text) {
    if (text.empty() || text == "auto") return std::nullopt;
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != text.size() || value == 0 || text.front() == '-') {
        throw ParameterOutOfRange("--k must be a positive integer or 'auto', got '" + text + "'");
    }
    return static_cast<std::size_t>(value);
}

PipelineSpec pipeline_spec(const RunConfig& c) {
    PipelineSpec spec;
    spec.raw_csv = c.raw_csv;
    spec.columns = c.columns;
    spec.system_node = c.system_node;
    spec.k = parse_k(c.k);
    spec.k_max = c.k_max;
    spec.seed = c.seed;
    return spec;
}

MarketInstance load_checked_instance(const RunConfig& c) {
    if (c.instance.empty()) throw InvalidInput("--instance is required");
    auto instance = load_instance(c.instance);
    if (auto v = validate_instance(instance); !v.empty()) throw ValidationFailed(std::move(v));
    return instance;
}

struct LoadedScenarios {
    ScenarioSet scenarios;
    std::optional<PreparedScenarios> prepared;
};

LoadedScenarios load_checked_scenarios(const RunConfig& c, const MarketInstance& instance) {
    const bool from_file = !c.scenarios.empty();
    const bool from_csv = !c.raw_csv.empty();
    if (from_file == from_csv) throw InvalidInput("give exactly one of --scenarios or --raw-csv");
    LoadedScenarios out;
    if (from_file) {
        out.scenarios = load_scenarios(c.scenarios, instance);
    } else {
        out.prepared = prepare_scenarios(instance, pipeline_spec(c));
        out.scenarios = out.prepared->scenarios;
    }
    if (auto v = validate_instance(instance, out.scenarios); !v.empty()) throw ValidationFailed(std::move(v));
    return out;
}

Eigen::MatrixXd resolve_q(const RunConfig& c, const MarketInstance& instance, const LoadedScenarios& loaded) {
    const auto ids = instance.market_ids();
    if (!c.q.empty()) return load_q(c.q, ids);
    if (loaded.prepared) return loaded.prepared->q.q;
    const auto m = static_cast<Eigen::Index>(instance.num_markets());
    return Eigen::MatrixXd::Identity(m, m);
}

DroPenalty resolve_penalty(const RunConfig& c) {
    if (!c.dro_penalty) return DroPenalty::PerScenario;
    const auto mode = parse_dro_penalty(*c.dro_penalty);
    if (!mode) throw InvalidInput("unknown --dro-penalty '" + *c.dro_penalty + "'");
    return *mode;
}

fs::path output_dir(const RunConfig& c) {
    fs::path dir = c.out.empty() ? fs::path(".") : fs::path(c.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
    if (c.instance.empty()) throw InvalidInput("--instance is required");
    const auto instance = load_instance(c.instance);
    auto violations = validate_instance(instance);
    if (violations.empty() && (!c.scenarios.empty() || !c.raw_csv.empty())) {
        try {
            load_checked_scenarios(c, instance);
        } catch (const ValidationFailed& e) {
            violations = e.violations;
        }
    }
    json doc;
    doc["valid"] = violations.empty();
    doc["violations"] = violations_json(violations);
    out << doc.dump() << "\n";
    return violations.empty() ? kExitOk : kExitInput;
}

int cmd_solve(const RunConfig& c, std::ostream& out) {
    const auto kind = parse_model_kind(c.kind);
    if (!kind) throw InvalidInput("unknown --kind '" + c.kind + "'");
    if (*kind != ModelKind::Cvar && (c.alpha || c.lambda)) {
        throw InvalidInput("--alpha/--lambda only apply to --kind cvar");
    }
    if (*kind != ModelKind::Dro && (c.epsilon || !c.q.empty() || c.dro_penalty)) {
        throw InvalidInput("--epsilon/--q/--dro-penalty only apply to --kind dro");
    }
    const auto instance = load_checked_instance(c);
    const auto loaded = load_checked_scenarios(c, instance);

    FormulationConfig config;
    switch (*kind) {
        case ModelKind::RiskNeutral:
            config = FormulationConfig::risk_neutral();
            break;
        case ModelKind::Cvar:
            config = FormulationConfig::cvar(c.alpha.value_or(0.95), c.lambda.value_or(0.1));
            break;
        case ModelKind::Dro:
            config = FormulationConfig::dro(c.epsilon.value_or(0.0), resolve_q(c, instance, loaded), resolve_penalty(c));
            break;
    }
    config.check();
    const auto dir = output_dir(c);
    const auto report = solve_allocation(instance, loaded.scenarios, config);
    const double riskfree = risk_free_profit(instance, loaded.scenarios);
    std::vector<MetricRow> rows;
    for (const double g : c.gamma) rows.push_back(metric_row(report, loaded.scenarios, g, riskfree));

    write_text_file(dir / "report.json", report_to_json(report, instance));
    write_text_file(dir / "metrics.csv", tradeoff_csv(rows));

    json doc;
    doc["command"] = "solve";
    doc["kind"] = std::string(to_string(*kind));
    doc["objective"] = round_sig9(report.objective_value());
    doc["outputs"] = {(dir / "report.json").string(), (dir / "metrics.csv").string()};
    out << doc.dump() << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
    if (c.alpha_grid.empty() && c.epsilon_grid.empty()) {
        throw InvalidInput("sweep needs a non-empty --alpha-grid or --epsilon-grid");
    }
    const auto instance = load_checked_instance(c);
    const auto loaded = load_checked_scenarios(c, instance);

    SweepSpec spec;
    spec.alpha_grid = c.alpha_grid;
    spec.epsilon_grid = c.epsilon_grid;
    spec.gammas = c.gamma;
    spec.lambda = c.lambda.value_or(0.1);
    if (!spec.epsilon_grid.empty()) spec.q = resolve_q(c, instance, loaded);
    spec.dro_penalty = resolve_penalty(c);
    spec.threads = std::max<std::size_t>(1, c.threads);
    const auto dir = output_dir(c);
    const auto result = sweep(instance, loaded.scenarios, spec);

    auto failures = json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"kind", std::string(to_string(f.kind))}, {"parameter", f.parameter}, {"error", f.error}});
    }
    write_text_file(dir / "tradeoff.csv", tradeoff_csv(result.rows));
    write_text_file(dir / "failures.json", failures.dump(2) + "\n");

    json doc;
    doc["command"] = "sweep";
    doc["rows"] = result.rows.size();
    doc["failures"] = result.failures.size();
    doc["outputs"] = {(dir / "tradeoff.csv").string(), (dir / "failures.json").string()};
    out << doc.dump() << "\n";
    return kExitOk;
}

int cmd_prepare(const RunConfig& c, std::ostream& out) {
    if (c.raw_csv.empty()) throw InvalidInput("--raw-csv is required");
    const auto instance = load_checked_instance(c);
    const auto spec = pipeline_spec(c);
    const auto prepared = prepare_scenarios(instance, spec);
    const auto dir = output_dir(c);
    write_text_file(dir / "scenarios.json", scenarios_to_json(prepared.scenarios, instance));
    write_text_file(dir / "q.json", q_to_json(prepared.q));
    write_text_file(dir / "prep_summary.json", prep_summary_json(prepared, spec));

    json doc;
    doc["command"] = "prepare";
    doc["k"] = prepared.reduction.k();
    doc["jitter"] = prepared.q.jitter;
    doc["outputs"] = {(dir / "scenarios.json").string(), (dir / "q.json").string(),
                      (dir / "prep_summary.json").string()};
    out << doc.dump() << "\n";
    return kExitOk;
}

void report_error(std::ostream& err, const std::string& code, const std::string& message, json extra = json::object()) {
    json doc;
    doc["error"] = code;
    doc["message"] = message;
    for (auto& [key, value] : extra.items()) doc[key] = value;
    err << doc.dump() << "\n";
}

struct Flags {
    std::string config;
    RunConfig values;
    double alpha = 0;
    double lambda = 0;
    double epsilon = 0;
    std::string dro_penalty;
};

std::map<std::string, CLI::Option*> add_flags(CLI::App* sub, Flags& f) {
    auto& v = f.values;
    std::map<std::string, CLI::Option*> o;
    o["config"] = sub->add_option("--config", f.config, "JSON run config; flags override it");
    o["instance"] = sub->add_option("--instance", v.instance, "instance JSON");
    o["scenarios"] = sub->add_option("--scenarios", v.scenarios, "scenario JSON");
    o["raw_csv"] = sub->add_option("--raw-csv", v.raw_csv, "long-format LMP CSV");
    o["columns"] = sub->add_option("--columns", v.columns, "timestamp=<col>,node=<col>,price=<col> or 'pjm'");
    o["system_node"] = sub->add_option("--system-node", v.system_node, "node id of the system price");
    o["k"] = sub->add_option("--k", v.k, "number of scenarios or 'auto'");
    o["k_max"] = sub->add_option("--k-max", v.k_max, "largest k tried by 'auto'");
    o["kind"] = sub->add_option("--kind", v.kind, "risk_neutral | cvar | dro");
    o["alpha"] = sub->add_option("--alpha", f.alpha, "CVaR level");
    o["lambda"] = sub->add_option("--lambda", f.lambda, "weight on expected profit");
    o["epsilon"] = sub->add_option("--epsilon", f.epsilon, "Wasserstein radius");
    o["q"] = sub->add_option("--q", v.q, "Q matrix JSON");
    o["dro_penalty"] = sub->add_option("--dro-penalty", f.dro_penalty, "per_scenario | per_period");
    o["gamma"] = sub->add_option("--gamma", v.gamma, "CVaR levels for metrics")->delimiter(',');
    o["alpha_grid"] = sub->add_option("--alpha-grid", v.alpha_grid, "CVaR sweep levels")->delimiter(',');
    o["epsilon_grid"] = sub->add_option("--epsilon-grid", v.epsilon_grid, "DRO sweep radii")->delimiter(',');
    o["out"] = sub->add_option("--out", v.out, "output directory");
    o["seed"] = sub->add_option("--seed", v.seed, "k-means seed");
    o["threads"] = sub->add_option("--threads", v.threads, "sweep worker threads");
    return o;
}

RunConfig merge(const Flags& f, const std::map<std::string, CLI::Option*>& o) {
    RunConfig c;
    if (!f.config.empty()) {
        const auto base = fs::path(f.config).parent_path().string();
        apply_config_json(c, read_text_file(f.config), base);
    }
    const auto given = [&](const char* key) { return o.at(key)->count() > 0; };
    const auto& v = f.values;
    if (given("instance")) c.instance = v.instance;
    if (given("scenarios")) c.scenarios = v.scenarios;
    if (given("raw_csv")) c.raw_csv = v.raw_csv;
    if (given("columns")) c.columns = v.columns;
    if (given("system_node")) c.system_node = v.system_node;
    if (given("k")) c.k = v.k;
    if (given("k_max")) c.k_max = v.k_max;
    if (given("kind")) c.kind = v.kind;
    if (given("alpha")) c.alpha = f.alpha;
    if (given("lambda")) c.lambda = f.lambda;
    if (given("epsilon")) c.epsilon = f.epsilon;
    if (given("q")) c.q = v.q;
    if (given("dro_penalty")) c.dro_penalty = f.dro_penalty;
    if (given("gamma")) c.gamma = v.gamma;
    if (given("alpha_grid")) c.alpha_grid = v.alpha_grid;
    if (given("epsilon_grid")) c.epsilon_grid = v.epsilon_grid;
    if (given("out")) c.out = v.out;
    if (given("seed")) c.seed = v.seed;
    if (given("threads")) c.threads = v.threads;
    return c;
}

}  // namespace

void apply_config_json(RunConfig& c, const std::string& json_text, const std::string& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidInput("config: document must be a JSON object");
    static const std::vector<std::string> known{
        "instance", "scenarios", "raw_csv", "columns", "system_node", "k", "k_max", "kind", "alpha", "lambda",
        "epsilon", "q", "dro_penalty", "gamma", "alpha_grid", "epsilon_grid", "out", "seed", "threads"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw InvalidInput("config: unknown key '" + key + "'");
        }
    }
    try {
        read_key(doc, "instance", c.instance);
        read_key(doc, "scenarios", c.scenarios);
        read_key(doc, "raw_csv", c.raw_csv);
        read_key(doc, "columns", c.columns);
        read_key(doc, "system_node", c.system_node);
        if (doc.contains("k")) c.k = doc["k"].is_string() ? doc["k"].get<std::string>() : doc["k"].dump();
        read_key(doc, "k_max", c.k_max);
        read_key(doc, "kind", c.kind);
        read_key(doc, "alpha", c.alpha);
        read_key(doc, "lambda", c.lambda);
        read_key(doc, "epsilon", c.epsilon);
        read_key(doc, "q", c.q);
        read_key(doc, "dro_penalty", c.dro_penalty);
        read_key(doc, "gamma", c.gamma);
        read_key(doc, "alpha_grid", c.alpha_grid);
        read_key(doc, "epsilon_grid", c.epsilon_grid);
        read_key(doc, "out", c.out);
        read_key(doc, "seed", c.seed);
        read_key(doc, "threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("config: ") + e.what());
    }
    if (!base_dir.empty()) {
        for (auto* path : {&c.instance, &c.scenarios, &c.raw_csv, &c.q, &c.out}) {
            if (!path->empty() && fs::path(*path).is_relative()) *path = (fs::path(base_dir) / *path).string();
        }
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Supply allocation across contracts and elastic spot markets"};
    app.require_subcommand(1);
    const std::vector<std::pair<const char*, const char*>> commands{
        {"solve", "solve one model and write report.json and metrics.csv"},
        {"sweep", "trace tradeoff curves over alpha and epsilon grids"},
        {"prepare", "reduce a raw price CSV into scenarios.json and q.json"},
        {"validate", "check an instance (and scenarios) against the domain rules"}};
    Flags flags;
    std::map<std::string, std::map<std::string, CLI::Option*>> options;
    for (const auto& [name, help] : commands) options[name] = add_flags(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return kExitInput;
    }

    const auto* sub = app.get_subcommands().front();
    const auto name = sub->get_name();
    try {
        const auto config = merge(flags, options.at(name));
        if (name == "solve") return cmd_solve(config, out);
        if (name == "sweep") return cmd_sweep(config, out);
        if (name == "prepare") return cmd_prepare(config, out);
        return cmd_validate(config, out);
    } catch (const ValidationFailed& e) {
        report_error(err, "validation", e.what(), {{"violations", violations_json(e.violations)}});
        return kExitInput;
    } catch (const IoError& e) {
        report_error(err, "io", e.what());
        return kExitInput;
    } catch (const ParseError& e) {
        report_error(err, "parse", e.what(), {{"line", e.line()}});
        return kExitInput;
    } catch (const MissingObservation& e) {
        report_error(err, "missing_observation", e.what());
        return kExitInput;
    } catch (const ParameterOutOfRange& e) {
        report_error(err, "parameter_out_of_range", e.what());
        return kExitInput;
    } catch (const DimensionMismatch& e) {
        report_error(err, "dimension_mismatch", e.what());
        return kExitInput;
    } catch (const InfeasibleStructure& e) {
        report_error(err, "infeasible_structure", e.what());
        return kExitInput;
    } catch (const InvalidInput& e) {
        report_error(err, "invalid_input", e.what());
        return kExitInput;
    } catch (const SolveFailed& e) {
        report_error(err, "solve_failed", e.what());
        return kExitSolver;
    } catch (const NumericalFailure& e) {
        report_error(err, "numerical_failure", e.what());
        return kExitSolver;
    } catch (const ConsistencyError& e) {
        report_error(err, "consistency", e.what());
        return kExitSolver;
    } catch (const std::exception& e) {
        report_error(err, "internal", e.what());
        return kExitSolver;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"portalloc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace portalloc::cli
