#pragma once

#include <string>
#include <vector>

#include "omch/channel_core.hpp"
#include "omch/errors.hpp"

namespace omch {

enum class Level { Adiabatic, Rwa, Full };

Level level_from_string(const std::string& s); // throws ConfigError
std::string to_string(Level level);

/// Complete description of one run: physical parameters, schedule, fidelity
/// level and output controls. Built preset-first, then config file, then
/// command-line overrides (highest precedence).
struct RunConfig {
    std::string preset_name; ///< empty when parameters are explicit
    SystemParams params;
    double tau1 = 0.0; ///< evaluation point for `channel`, sweep end elsewhere
    double tau2 = 0.0;
    double tau_s = 0.0;
    double tau1_max = 0.0;
    double tau2_max = 0.0;
    Level level = Level::Adiabatic;
    std::string out; ///< output path (or prefix for the Wigner grids)
    int points = 65;
    int wigner_points = 201;
    double wigner_halfwidth = 0.0; ///< 0 = auto (6 sigma)
    double dt = 0.0;               ///< 0 = solver default
    int threads = 0;               ///< 0 = hardware concurrency
    bool allow_out_of_range = false;

    /// Throws ConfigError on bad values or schedule beyond the preset limits
    /// (unless allow_out_of_range).
    void validate() const;
};

/// Start from a preset (optional), then apply a config file (optional), then
/// `key=value` overrides, in that order.
RunConfig build_run_config(const std::string& preset_name, const std::string& config_path,
                           const std::vector<std::string>& overrides);

/// Apply one `key=value` assignment; throws ConfigError for unknown keys.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

} // namespace omch
