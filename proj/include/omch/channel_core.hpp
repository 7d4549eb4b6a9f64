#pragma once

#include <vector>

#include "omch/errors.hpp"

namespace omch {

/// Physical rates and occupations of the optomechanical system.
/// Everything is dimensionless: rates in units of kappa, times in 1/kappa.
struct SystemParams {
    double kappa = 1.0;    ///< total cavity decay rate (the normalization unit)
    double kappa_e = 1.0;  ///< external (waveguide) decay rate
    double gamma = 0.0;    ///< mechanical damping rate
    double omega_m = 50.0; ///< mechanical frequency (enters only the non-RWA solver)
    double g1 = 0.0;       ///< enhanced coupling g0*sqrt(N1) of the upload pulse
    double g2 = 0.0;       ///< enhanced coupling g0*sqrt(N2) of the readout pulse
    double n0 = 0.0;       ///< initial mechanical thermal occupation
    double n_th = 0.0;     ///< mechanical bath occupation

    double eta() const { return kappa_e / kappa; }

    /// Throws std::domain_error unless kappa > 0, 0 < kappa_e <= kappa,
    /// gamma >= 0, omega_m > 0, couplings >= 0, occupations >= 0.
    void validate() const;
};

/// Durations of the upload/readout pulses and of the storage between them.
struct PulseSchedule {
    double tau1 = 0.0;  ///< upload pulse duration
    double tau2 = 0.0;  ///< readout pulse duration
    double tau_s = 0.0; ///< storage time

    void validate() const; // all durations >= 0
};

/// The phase-insensitive Gaussian channel: total transmittance and
/// added-noise quadrature variance in shot-noise units (vacuum = 1,
/// X = a^dag + a, Y = i(a^dag - a)).
struct EffectiveChannel {
    double T = 0.0;
    double VN = 1.0;
};

/// Partial-swap transmittance of one red-detuned pulse: 1 - exp(-2 g^2 tau / kappa).
/// Strictly increasing in g and tau, always in [0, 1).
double swap_transmittance(double g, double tau, double kappa = 1.0);

/// Storage transmittance delta = exp(-gamma * tau_s).
double storage_decay(double gamma, double tau_s);

/// Round-trip transmittance T1 * T2 * eta^2 * delta. All arguments in [0, 1].
double total_transmittance(double T1, double T2, double eta, double delta);

/// Added-noise variance of the complete channel,
///   V_N = 1 + T2 eta / (1 - T) * [ 2 n0 delta (1 - T1) + 2 n_th (1 - delta) ].
/// Throws SingularChannelError when the total transmittance reaches 1.
double added_noise_variance(double n0, double n_th, double eta,
                            double T1, double T2, double delta);
double added_noise_variance(const SystemParams& params,
                            double T1, double T2, double delta);

/// V_N below this bound transfers Wigner-function negativity: T / (1 - T).
double negativity_threshold(double T);

/// V_N below this bound preserves entanglement: 2 T / (1 - T) + 1.
double entanglement_threshold(double T);

/// Analytic partial derivative dV_N/dT with T2 (resp. T1) held fixed and the
/// transmittance varied through T1 (resp. T2). Used by the monotonicity tests.
double dVN_dT_fixed_T2(double n0, double n_th, double eta,
                       double T1, double T2, double delta);
double dVN_dT_fixed_T1(double n0, double n_th, double eta,
                       double T1, double T2, double delta);

/// Closed-form adiabatic evaluation of the full schedule.
EffectiveChannel effective_channel(const SystemParams& params, const PulseSchedule& schedule);

/// Which transmittance is held fixed while the other sweeps [0, 1).
enum class CurveSweep { FixedT1, FixedT2, Diagonal };

/// One line of the noise-versus-transmittance plot: n_points samples of
/// (T, V_N) with the free transmittance on a uniform right-open grid in [0, 1).
std::vector<EffectiveChannel> noise_vs_transmittance_curve(
    const SystemParams& params, double delta, CurveSweep sweep,
    double fixed_value, int n_points);

} // namespace omch
