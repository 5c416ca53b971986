#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "specmarket/errors.hpp"
#include "specmarket/estimators.hpp"
#include "specmarket/model.hpp"

namespace specmarket {

/// Parse failure tied to a key and, when it came from text, a line.
class ConfigError : public ValidationError {
public:
    ConfigError(std::string key, std::size_t line, const std::string& what);

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }  // 0 when not from a line

private:
    std::string key_;
    std::size_t line_;
};

struct ExperimentSettings {
    std::size_t n_seeds = 50;
    std::uint64_t master_seed = 42;
    std::string column = "general";
    TailMethod tail_method = TailMethod::least_squares;
    std::vector<double> sweep_mean_nI{0.1, 0.3, 0.5};
    std::vector<std::int64_t> sweep_T{100};
    std::size_t sessions = 20;
    std::int64_t session_T = 100;
    std::size_t max_lag = 100;

    friend bool operator==(const ExperimentSettings&, const ExperimentSettings&) = default;
};

struct OutputSettings {
    std::string directory = ".";
    bool csv = true;
    bool json = true;
    bool svg = true;

    friend bool operator==(const OutputSettings&, const OutputSettings&) = default;
};

struct RunConfig {
    std::string scenario = "default";
    ModelParams model;
    ExperimentSettings experiment;
    OutputSettings output;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat `key = value` text. Keys before any header are top-level
/// (`scenario`, `preset`); `[model]`, `[experiment]` and `[output]` hold the
/// rest. `#` starts a comment. `preset` (general | speculative) picks the
/// model defaults that `[model]` then overrides.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& file);

/// Writes every field; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

} // namespace specmarket
