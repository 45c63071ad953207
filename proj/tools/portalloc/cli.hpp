#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace portalloc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitSolver = 3;

/// Settings of one run. Read from `--config` JSON (same key names), then
/// overridden by flags. Relative paths in a config file resolve against the
/// file's directory.
struct RunConfig {
    std::string instance;
    std::string scenarios;
    std::string raw_csv;
    std::string columns;
    std::string system_node = "SYSTEM";
    std::string k;  ///< number or "auto"; empty means auto
    std::size_t k_max = 20;
    std::string kind = "risk_neutral";
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<double> epsilon;
    std::string q;
    std::optional<std::string> dro_penalty;
    std::vector<double> gamma{0.90, 0.95};
    std::vector<double> alpha_grid;
    std::vector<double> epsilon_grid;
    std::string out = ".";
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// Applies a config document on top of `config`.
void apply_config_json(RunConfig& config, const std::string& json_text, const std::string& base_dir);

/// Entry point shared by the executable and the tests. Returns the exit code;
/// errors are written to `err` as one JSON object.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with `args` excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace portalloc::cli
