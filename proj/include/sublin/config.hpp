#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sublin/params.hpp"

namespace sublin {

// All problems found in one parse, aggregated into a single error.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(std::vector<std::string> problems);
    [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

enum class ReferenceMode { catalog_sup, pde_limit };

std::string to_string(ReferenceMode mode);

struct ExperimentConfig {
    GParams params = GParams::make(1.0, 1.0);

    std::vector<std::string> strategies = {"const_hi/gaussian"};
    std::vector<std::string> functions = {"cos:1"};

    std::int64_t n_paths = 100;
    int n_blocks = 10;
    std::vector<std::int64_t> horizons = {1000, 10000, 100000, 1000000};
    std::uint64_t seed = 1;
    double alpha = 0.5;
    ReferenceMode reference_mode = ReferenceMode::catalog_sup;
    int jobs = 1;
    std::int64_t max_paths = 131072;  // cap for adaptive path escalation

    // negative controls
    double drift = 0.0;
    double target_offset = 0.0;

    // tolerances
    double eps_slln = 0.1;
    double delta_slln = 0.05;
    double delta_asclt = 0.15;
    double frac_asclt = 0.8;
    double eps_h = 1e-3;
    double pde_tol = 1e-4;
    double eps_mean = 0.1;  // hypothesis gate on |E T_n|, scaled by M_f
    // Monte Carlo resolution target for run_rate: the per-horizon standard
    // error must stay below max(dev(n), rate_se_floor * dev(n_first)) / 3.
    // 0 demands resolving dev(n) itself at every horizon, which cannot
    // terminate once the adversary catalog drives the true deviation to
    // zero; a positive floor anchors the requirement to the decay
    // decision scale instead.
    double rate_se_floor = 0.0;

    bool operator==(const ExperimentConfig&) const = default;

    // Canonical "section.key" pairs, fixed order; feeds serialization,
    // report echoes, and the config hash.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> canonical_items() const;
    [[nodiscard]] std::string hash() const;

    void validate_or_collect(std::vector<std::string>& problems) const;
};

// Strict parser for the flat `key = value` format with bracketed section
// headers. Unknown sections or keys, duplicate keys, type mismatches and
// range violations are all collected and reported together. An empty
// document yields the default config.
ExperimentConfig parse_config(const std::string& text);

std::string serialize_config(const ExperimentConfig& config);

// "section.key=value" overrides applied on top of a parsed config.
void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides);

}  // namespace sublin
