#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "omch/channel_core.hpp"
#include "omch/config.hpp"
#include "omch/fock_analysis.hpp"

namespace omch {

/// One row of a sweep table. fixed_value is the held pulse duration for the
/// t1_fixed / t2_fixed families and -1 where no parameter is held.
struct SweepRecord {
    std::string family;
    std::string style;
    double fixed_value = -1.0;
    double sweep_value = 0.0;
    double tau1 = 0.0, tau2 = 0.0;
    double T1 = 0.0, T2 = 0.0;
    double T = 0.0, VN = 1.0;
    double VN_neg = 0.0, VN_ent = 1.0;
    double p0 = 0.0, p1 = 0.0, p2plus = 0.0;
    double margin = 0.0, W00 = 0.0;
    std::string flag = "ok"; ///< ok | singular
};

/// Fixed, versioned CSV header (schema line "# schema omch-sweep-v1").
extern const char* const kSweepCsvHeader;
extern const char* const kSweepSchemaLine;

/// Evaluate one schedule point at the requested fidelity level and fill the
/// physics columns (transmittances, noise, thresholds, Fock probabilities,
/// witness margin, Wigner origin value).
SweepRecord evaluate_point(const RunConfig& config, double tau1, double tau2);

struct ChannelReport {
    SweepRecord record;
    double delta = 1.0;
    double xy_asymmetry = 0.0;
    bool negativity = false;
    bool entanglement = false;
    bool nongaussian = false;
};

/// `channel` subcommand: single-point report, printed and optionally written.
ChannelReport cmd_channel(const RunConfig& config, std::ostream& log);

/// `fig2` subcommand: noise-vs-transmittance families plus a threshold-curve
/// table next to the main file. Returns the emitted records.
std::vector<SweepRecord> cmd_fig2(const RunConfig& config, std::ostream& log);

/// `fig3` subcommand: (p1, p2+) trajectory with the non-Gaussianity boundary
/// polyline and the boundary-crossing metadata.
std::vector<SweepRecord> cmd_fig3(const RunConfig& config, std::ostream& log);

struct Fig4Point {
    std::string label; ///< A, B, C, D
    double tau1 = 0.0, tau2 = 0.0;
    double T = 0.0, VN = 1.0;
    double W00 = 0.0, margin = 0.0;
    double wigner_integral = 0.0;
    std::string path;
};

/// `fig4` subcommand: four Wigner grids bracketing the negativity and
/// non-Gaussianity crossings, one CSV matrix per point.
std::vector<Fig4Point> cmd_fig4(const RunConfig& config, std::ostream& log);

/// `boundary` subcommand: table of the non-Gaussianity boundary.
void cmd_boundary(const RunConfig& config, std::ostream& log);

/// `presets` subcommand: list the built-in parameter sets.
void cmd_presets(std::ostream& log);

/// Deterministic index-parallel map (worker pool, exceptions propagate).
void parallel_for_index(int n, int threads, const std::function<void(int)>& fn);

} // namespace omch
