#include "omch/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "omch/presets.hpp"

namespace omch {

Level level_from_string(const std::string& s) {
    if (s == "adiabatic") return Level::Adiabatic;
    if (s == "rwa") return Level::Rwa;
    if (s == "full") return Level::Full;
    throw ConfigError("unknown level '" + s + "' (expected adiabatic|rwa|full)");
}

std::string to_string(Level level) {
    switch (level) {
    case Level::Adiabatic: return "adiabatic";
    case Level::Rwa: return "rwa";
    case Level::Full: return "full";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    auto begin = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
    auto end = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
    return begin < end ? std::string(begin, end) : std::string();
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': cannot parse number from '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError("key '" + key + "': trailing characters in '" + value + "'");
    return v;
}

int parse_int(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("key '" + key + "': expected a boolean, got '" + value + "'");
}

void apply_preset(RunConfig& config, const std::string& name) {
    const ExperimentPreset& p = preset_by_name(name);
    config.preset_name = p.name;
    config.params = p.params;
    config.tau1_max = p.tau1_max;
    config.tau2_max = p.tau2_max;
    config.tau1 = p.tau1_max;
    config.tau2 = p.tau2_max;
    config.tau_s = p.tau_s;
}

} // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "preset") { apply_preset(config, value); return; }
    if (key == "eta") { config.params.kappa_e = parse_double(key, value) * config.params.kappa; return; }
    if (key == "kappa_e") { config.params.kappa_e = parse_double(key, value); return; }
    if (key == "gamma") { config.params.gamma = parse_double(key, value); return; }
    if (key == "omega_m") { config.params.omega_m = parse_double(key, value); return; }
    if (key == "g1") { config.params.g1 = parse_double(key, value); return; }
    if (key == "g2") { config.params.g2 = parse_double(key, value); return; }
    if (key == "n0") { config.params.n0 = parse_double(key, value); return; }
    if (key == "n_th") { config.params.n_th = parse_double(key, value); return; }
    if (key == "tau1") { config.tau1 = parse_double(key, value); return; }
    if (key == "tau2") { config.tau2 = parse_double(key, value); return; }
    if (key == "tau_s") { config.tau_s = parse_double(key, value); return; }
    if (key == "tau1_max") { config.tau1_max = parse_double(key, value); return; }
    if (key == "tau2_max") { config.tau2_max = parse_double(key, value); return; }
    if (key == "level") { config.level = level_from_string(value); return; }
    if (key == "out") { config.out = value; return; }
    if (key == "points") { config.points = parse_int(key, value); return; }
    if (key == "wigner_points") { config.wigner_points = parse_int(key, value); return; }
    if (key == "wigner_halfwidth") { config.wigner_halfwidth = parse_double(key, value); return; }
    if (key == "dt") { config.dt = parse_double(key, value); return; }
    if (key == "threads") { config.threads = parse_int(key, value); return; }
    if (key == "allow_out_of_range") { config.allow_out_of_range = parse_bool(key, value); return; }
    throw ConfigError("unknown configuration key '" + key + "'");
}

namespace {

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        entries.emplace_back(key, value);
    }
    return entries;
}

} // namespace

RunConfig build_run_config(const std::string& preset_name, const std::string& config_path,
                           const std::vector<std::string>& overrides) {
    std::vector<std::pair<std::string, std::string>> file_entries;
    if (!config_path.empty()) file_entries = read_config_file(config_path);

    // The base preset: command line wins over the file's `preset` key.
    std::string base = preset_name;
    if (base.empty())
        for (const auto& [key, value] : file_entries)
            if (key == "preset") base = value;

    RunConfig config;
    if (!base.empty()) apply_preset(config, base);
    for (const auto& [key, value] : file_entries)
        if (key != "preset") apply_config_entry(config, key, value);
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + ov + "' is not of the form key=value");
        apply_config_entry(config, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
    }
    return config;
}

void RunConfig::validate() const {
    params.validate();
    if (tau1 < 0.0 || tau2 < 0.0 || tau_s < 0.0)
        throw ConfigError("durations must be >= 0");
    if (tau1_max < 0.0 || tau2_max < 0.0)
        throw ConfigError("schedule limits must be >= 0");
    if (points < 2)
        throw ConfigError("points must be >= 2");
    if (wigner_points < 2)
        throw ConfigError("wigner_points must be >= 2");
    if (dt < 0.0)
        throw ConfigError("dt must be >= 0");
    if (!allow_out_of_range && tau1_max > 0.0 && tau1 > tau1_max * (1.0 + 1e-12))
        throw ConfigError("tau1 exceeds the preset limit (pass --allow-out-of-range to override)");
    if (!allow_out_of_range && tau2_max > 0.0 && tau2 > tau2_max * (1.0 + 1e-12))
        throw ConfigError("tau2 exceeds the preset limit (pass --allow-out-of-range to override)");
}

} // namespace omch
