#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rdsig/model.hpp"

namespace rdsig {

enum class Preset {
    fig1,
    fig_pmiss_sigma,
    fig_exponent_vs_bound,
    fig_mu1zero,
    fig_dishwasher
};

std::optional<Preset> preset_from_name(const std::string& name);
std::string preset_name(Preset preset);
const std::vector<std::string>& preset_names();

// Fully resolved experiment description. Resolution order:
// defaults < preset < config file < flag overrides.
struct ExperimentConfig {
    explicit ExperimentConfig(ModelParams p) : params(std::move(p)) {}

    ModelParams params;
    int t_horizon = 200;
    int runs = 100000;  // pre-scale run count
    double alpha = 0.01;
    std::vector<double> sigma_grid;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    std::optional<Preset> preset;
    int threads = 1;
    double scale = 0.1;

    // Effective Monte Carlo run count after scaling.
    int effective_runs() const;

    // Canonical one-line rendering of everything that affects outputs
    // (threads and output_dir excluded).
    std::string canonical() const;

    // FNV-1a 64 of canonical(), hex.
    std::string config_hash() const;

    // Metadata line for output files.
    std::string metadata() const;
};

// One key=value assignment plus where it came from (line 0 = CLI flag).
struct KeyValue {
    std::string key;
    std::string value;
    int line = 0;
};

// key=value lines; '#' comments and blank lines ignored.
std::vector<KeyValue> parse_key_value_file(const std::filesystem::path& path);

// Layered resolution. Unknown keys and invariant violations raise ConfigError
// naming the key (and line, for file sources).
ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const std::vector<KeyValue>& flag_overrides);

}  // namespace rdsig
