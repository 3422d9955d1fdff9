#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jacobimax/ensemble.hpp"
#include "jacobimax/extremes.hpp"

namespace jacobimax {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fully resolved experiment configuration. File keys may be grouped under
/// [sections] for readability; key names are globally unique. Command-line
/// flags override file values.
struct ExperimentConfig {
    std::string command;

    // ensemble
    std::string kind = "gbe";  // gbe | generic
    double beta = 2.0;
    double v = 1.0;
    std::string family = "uniform";
    bool truncate = false;
    double truncation_exponent = 2.0;

    // grid
    std::vector<std::size_t> n_values{1024};
    std::vector<double> z_values{1.0};
    double eta = 0.1;
    std::string net = "chebyshev";  // chebyshev | uniform
    std::size_t net_max_points = 16385;
    std::size_t uniform_count = 64;

    // schedule
    double kappa = 4.0;
    double delta = 0.0;  // 0 -> eta^2/8

    // run
    std::size_t replicas = 1;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = library default
    std::string out;
    std::size_t stride = 1;

    // barrier
    double barrier_C = 10.0;
    double barrier_q = 8.0;

    // diagnose
    double epsilon = 2.0;
    double anti_delta = 0.05;
    double tail_delta = 0.01;
    double cov_s = 5.0;
    double cov_t = 10.0;
    double block_r = 1.0;
    double block_delta_exponent = 0.25;

    EnsembleSpec ensemble_spec() const;
    void validate() const;
    std::string resolved_text() const;  // canonical key = value dump for provenance
};

/// Parses `key = value` lines with optional [section] headers and # comments.
/// Unknown keys are rejected by name.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace jacobimax
