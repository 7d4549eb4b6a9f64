#include "omch/channel_core.hpp"

#include <cmath>
#include <stdexcept>

namespace omch {

void SystemParams::validate() const {
    if (!(kappa > 0.0))
        throw std::domain_error("SystemParams: kappa must be positive");
    if (!(kappa_e > 0.0) || kappa_e > kappa)
        throw std::domain_error("SystemParams: need 0 < kappa_e <= kappa");
    if (gamma < 0.0)
        throw std::domain_error("SystemParams: gamma must be >= 0");
    if (!(omega_m > 0.0))
        throw std::domain_error("SystemParams: omega_m must be positive");
    if (g1 < 0.0 || g2 < 0.0)
        throw std::domain_error("SystemParams: couplings must be >= 0");
    if (n0 < 0.0 || n_th < 0.0)
        throw std::domain_error("SystemParams: occupations must be >= 0");
}

void PulseSchedule::validate() const {
    if (tau1 < 0.0 || tau2 < 0.0 || tau_s < 0.0)
        throw std::domain_error("PulseSchedule: durations must be >= 0");
}

double swap_transmittance(double g, double tau, double kappa) {
    if (g < 0.0 || tau < 0.0 || !(kappa > 0.0))
        throw std::domain_error("swap_transmittance: g, tau must be >= 0 and kappa > 0");
    return -std::expm1(-2.0 * g * g * tau / kappa);
}

double storage_decay(double gamma, double tau_s) {
    if (gamma < 0.0 || tau_s < 0.0)
        throw std::domain_error("storage_decay: gamma and tau_s must be >= 0");
    return std::exp(-gamma * tau_s);
}

namespace {

void check_unit_interval(double v, const char* name) {
    if (!(v >= 0.0) || v > 1.0)
        throw std::domain_error(std::string(name) + " must lie in [0, 1]");
}

} // namespace

double total_transmittance(double T1, double T2, double eta, double delta) {
    check_unit_interval(T1, "T1");
    check_unit_interval(T2, "T2");
    check_unit_interval(eta, "eta");
    check_unit_interval(delta, "delta");
    return T1 * T2 * eta * eta * delta;
}

double added_noise_variance(double n0, double n_th, double eta,
                            double T1, double T2, double delta) {
    if (n0 < 0.0 || n_th < 0.0)
        throw std::domain_error("added_noise_variance: occupations must be >= 0");
    const double T = total_transmittance(T1, T2, eta, delta);
    if (T >= 1.0)
        throw SingularChannelError("added_noise_variance: total transmittance reached 1");
    const double thermal = 2.0 * n0 * delta * (1.0 - T1) + 2.0 * n_th * (1.0 - delta);
    return 1.0 + T2 * eta / (1.0 - T) * thermal;
}

double added_noise_variance(const SystemParams& params,
                            double T1, double T2, double delta) {
    return added_noise_variance(params.n0, params.n_th, params.eta(), T1, T2, delta);
}

double negativity_threshold(double T) {
    if (!(T >= 0.0) || T >= 1.0)
        throw std::domain_error("negativity_threshold: T must lie in [0, 1)");
    return T / (1.0 - T);
}

double entanglement_threshold(double T) {
    if (!(T >= 0.0) || T >= 1.0)
        throw std::domain_error("entanglement_threshold: T must lie in [0, 1)");
    return 2.0 * T / (1.0 - T) + 1.0;
}

double dVN_dT_fixed_T2(double n0, double n_th, double eta,
                       double T1, double T2, double delta) {
    if (!(eta > 0.0))
        throw std::domain_error("dVN_dT_fixed_T2: eta must be positive");
    const double T = total_transmittance(T1, T2, eta, delta);
    const double om = 1.0 - T;
    return (-2.0 * n0 * (1.0 - delta * eta * eta * T2) / eta
            + 2.0 * n_th * (1.0 - delta) * eta * T2) / (om * om);
}

double dVN_dT_fixed_T1(double n0, double n_th, double eta,
                       double T1, double T2, double delta) {
    if (!(eta > 0.0) || !(T1 > 0.0) || !(delta > 0.0))
        throw std::domain_error("dVN_dT_fixed_T1: eta, T1, delta must be positive");
    const double T = total_transmittance(T1, T2, eta, delta);
    const double om = 1.0 - T;
    return (2.0 * n0 * (1.0 - T1) / eta
            + 2.0 * n_th * (1.0 - delta) / (delta * eta)) / (om * om * T1);
}

EffectiveChannel effective_channel(const SystemParams& params, const PulseSchedule& schedule) {
    params.validate();
    schedule.validate();
    const double T1 = swap_transmittance(params.g1, schedule.tau1, params.kappa);
    const double T2 = swap_transmittance(params.g2, schedule.tau2, params.kappa);
    const double delta = storage_decay(params.gamma, schedule.tau_s);
    EffectiveChannel out;
    out.T = total_transmittance(T1, T2, params.eta(), delta);
    out.VN = added_noise_variance(params, T1, T2, delta);
    return out;
}

std::vector<EffectiveChannel> noise_vs_transmittance_curve(
    const SystemParams& params, double delta, CurveSweep sweep,
    double fixed_value, int n_points) {
    params.validate();
    check_unit_interval(delta, "delta");
    if (sweep != CurveSweep::Diagonal && (!(fixed_value >= 0.0) || fixed_value >= 1.0))
        throw std::domain_error("noise_vs_transmittance_curve: fixed_value must lie in [0, 1)");
    if (n_points < 2)
        throw std::domain_error("noise_vs_transmittance_curve: need n_points >= 2");

    std::vector<EffectiveChannel> curve;
    curve.reserve(static_cast<std::size_t>(n_points));
    const double eta = params.eta();
    for (int i = 0; i < n_points; ++i) {
        const double u = static_cast<double>(i) / n_points; // right-open [0, 1)
        double T1 = u, T2 = u;
        switch (sweep) {
        case CurveSweep::FixedT1: T1 = fixed_value; break;
        case CurveSweep::FixedT2: T2 = fixed_value; break;
        case CurveSweep::Diagonal: break;
        }
        EffectiveChannel pt;
        pt.T = total_transmittance(T1, T2, eta, delta);
        pt.VN = added_noise_variance(params, T1, T2, delta);
        curve.push_back(pt);
    }
    return curve;
}

} // namespace omch
