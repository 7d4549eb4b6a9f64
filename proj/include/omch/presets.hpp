#pragma once

#include <string>
#include <vector>

#include "omch/channel_core.hpp"

namespace omch {

/// Published experimental parameter set: system rates plus the schedule
/// limits the sweeps stay inside.
struct ExperimentPreset {
    std::string name;
    SystemParams params;
    double tau1_max = 0.0;
    double tau2_max = 0.0;
    double tau_s = 0.0;

    PulseSchedule max_schedule() const { return {tau1_max, tau2_max, tau_s}; }
};

/// electro_palomaki, electro_ockeloen, opto_riedinger_eta50, opto_riedinger_eta25.
const std::vector<ExperimentPreset>& all_presets();

/// Throws ConfigError for an unknown name.
const ExperimentPreset& preset_by_name(const std::string& name);

} // namespace omch
