#pragma once

#include <array>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "omch/channel_core.hpp"
#include "omch/errors.hpp"

namespace omch {

/// One segment of the pulse sequence. Coupling is the enhanced optomechanical
/// rate in kappa units; it is zero during storage.
struct PulseStage {
    enum class Kind { Upload, Storage, Readout };
    Kind kind = Kind::Storage;
    double duration = 0.0;
    double coupling = 0.0;

    void validate() const;
};

/// Upload / storage / readout sequence built from the schedule and couplings.
std::array<PulseStage, 3> make_stages(const SystemParams& params, const PulseSchedule& schedule);

/// Normalized temporal envelope defining one bosonic mode of a pulse:
/// rising exponential e^{G t} on the upload, falling e^{-G t} on the readout,
/// flat in the G -> 0 limit. Times are relative to the stage start.
class TemporalMode {
public:
    enum class Shape { RisingExp, FallingExp };

    /// G >= 0 (G == 0 gives the flat 1/sqrt(tau) envelope), duration > 0.
    TemporalMode(Shape shape, double rate_G, double duration);

    double envelope(double t) const;
    /// The scalar multiplying the bare exponential: sqrt(2G / (e^{2 G tau} - 1))
    /// for the rising shape, sqrt(2G / (1 - e^{-2 G tau})) for the falling one.
    double normalization() const;
    /// Closed-form integral of envelope^2 over the stage; 1 by construction.
    double norm_square_integral() const { return 1.0; }

    Shape shape() const { return shape_; }
    double rate_G() const { return rate_G_; }
    double duration() const { return duration_; }

private:
    Shape shape_;
    double rate_G_;
    double duration_;
    double end_value_; // envelope at its maximum end, sqrt(2G / (1 - e^{-2 G tau}))
};

/// Adiabatic-limit input/output envelopes for swap rates G_i = g_i^2 / kappa.
/// Throws std::domain_error unless G1, G2 > 0 and durations > 0.
std::pair<TemporalMode, TemporalMode> adiabatic_envelopes(double G1, double G2,
                                                          double tau1, double tau2);

/// First and second moments of the propagated quadrature vector
/// [X_c, Y_c, X_m, Y_m, X_A, Y_A, X_B, Y_B]: cavity, mechanics, input-mode
/// accumulator and output-mode accumulator.
struct MomentState {
    Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
    Eigen::Matrix<double, 8, 8> cov = Eigen::Matrix<double, 8, 8>::Zero();
    /// Commutator matrix <[R_i, R_j]> / 2i, propagated alongside cov so the
    /// physicality bound cov + i*comm >= 0 is exact even for the accumulator
    /// modes, whose commutators grow from 0 to canonical as the envelopes fill.
    Eigen::Matrix<double, 8, 8> comm = Eigen::Matrix<double, 8, 8>::Zero();
};

struct PropagationOptions {
    /// Integrator step; 0 selects the default (0.01/kappa for the RWA path,
    /// min(0.01/kappa, 0.02/omega_m) on coupled stages of the non-RWA path).
    /// An explicit value may only refine the default, otherwise ConfigError.
    double dt = 0.0;
    bool check_physicality = true;
    double physicality_tol = 1e-8;
    /// Coherent displacement carried by the input temporal mode (mean-field
    /// drive); used by the linearity tests.
    double displace_x = 0.0;
    double displace_y = 0.0;
};

/// Channel parameters extracted from the moment propagation.
struct ExtractedChannel {
    double T_full = 0.0;       ///< |input -> output temporal-mode transfer|^2
    double VN_full = 1.0;      ///< (Var_out - T_full) / (1 - T_full)
    double xy_asymmetry = 0.0; ///< |Var X_N - Var Y_N|, ~0 under RWA
    bool vn_singular = false;  ///< set when 1 - T_full < 1e-12
    Eigen::Vector2d out_mean = Eigen::Vector2d::Zero(); ///< output accumulator mean
    Eigen::Matrix2d transfer = Eigen::Matrix2d::Zero(); ///< Cov(Q_B, Q_A)
};

struct PropagationResult {
    ExtractedChannel channel;
    MomentState final_state;
    /// Moments recorded at the end of each stage (upload, storage, readout).
    std::vector<MomentState> stage_snapshots;
};

/// Propagate the linearized Heisenberg-Langevin moments through the schedule
/// under the rotating wave approximation and extract (T, V_N).
ExtractedChannel propagate_rwa(const SystemParams& params, const PulseSchedule& schedule,
                               const TemporalMode& input_mode, const TemporalMode& output_mode,
                               const PropagationOptions& opts = {});

/// Same, retaining the counter-rotating e^{+-2 i omega_m t} terms.
ExtractedChannel propagate_full(const SystemParams& params, const PulseSchedule& schedule,
                                const TemporalMode& input_mode, const TemporalMode& output_mode,
                                const PropagationOptions& opts = {});

/// Full-detail entry point used by the tests.
PropagationResult propagate_moments(const SystemParams& params, const PulseSchedule& schedule,
                                    const TemporalMode& input_mode, const TemporalMode& output_mode,
                                    bool rwa, const PropagationOptions& opts = {});

/// Convenience wrapper: builds the adiabatic envelopes from the parameters
/// (flat when a coupling is zero) and tolerates zero-duration stages.
ExtractedChannel extract_channel(const SystemParams& params, const PulseSchedule& schedule,
                                 bool rwa, const PropagationOptions& opts = {});

/// Exact storage-stage map on the mechanical covariance:
/// V -> delta V + (1 - delta)(2 n_th + 1) I with delta = e^{-gamma tau_s}.
Eigen::Matrix2d storage_evolution(const Eigen::Matrix2d& mech_cov, double gamma,
                                  double tau_s, double n_th);

} // namespace omch
