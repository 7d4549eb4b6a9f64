#include "omch/langevin_sim.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace omch {

namespace {

// Quadrature ordering of the propagated vector.
constexpr int XC = 0, YC = 1, XM = 2, YM = 3, XA = 4, YA = 5, XB = 6, YB = 7;
// Noise ports: waveguide input, internal-loss vacuum, mechanical bath.
constexpr int IN_X = 0, IN_Y = 1, VAC_X = 2, VAC_Y = 3, TH_X = 4, TH_Y = 5;

using Mat8 = Eigen::Matrix<double, 8, 8>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat86 = Eigen::Matrix<double, 8, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Mat6 noise_commutators() {
    Mat6 j = Mat6::Zero();
    for (int p = 0; p < 3; ++p) {
        j(2 * p, 2 * p + 1) = 1.0;
        j(2 * p + 1, 2 * p) = -1.0;
    }
    return j;
}

struct StageContext {
    PulseStage stage;
    const TemporalMode* mode = nullptr; // input mode on upload, output mode on readout
    double t_start = 0.0;
};

struct IntegratorState {
    Vec8 m = Vec8::Zero();
    Mat8 v = Mat8::Zero();
    Mat8 s = Mat8::Zero();
};

IntegratorState operator*(double a, const IntegratorState& x) {
    IntegratorState r;
    r.m = a * x.m;
    r.v = a * x.v;
    r.s = a * x.s;
    return r;
}

IntegratorState operator+(const IntegratorState& a, const IntegratorState& b) {
    IntegratorState r;
    r.m = a.m + b.m;
    r.v = a.v + b.v;
    r.s = a.s + b.s;
    return r;
}

class MomentPropagator {
public:
    MomentPropagator(const SystemParams& params, bool rwa, const PropagationOptions& opts)
        : p_(params), rwa_(rwa), opts_(opts), j_(noise_commutators()) {
        n_sym_ = Vec6::Ones();
        n_sym_[TH_X] = n_sym_[TH_Y] = 2.0 * p_.n_th + 1.0;
    }

    MomentState initial_state() const {
        MomentState st;
        st.cov.setZero();
        st.cov(XC, XC) = st.cov(YC, YC) = 1.0;
        st.cov(XM, XM) = st.cov(YM, YM) = 2.0 * p_.n0 + 1.0;
        st.comm.setZero();
        st.comm(XC, YC) = 1.0;
        st.comm(YC, XC) = -1.0;
        st.comm(XM, YM) = 1.0;
        st.comm(YM, XM) = -1.0;
        return st;
    }

    void run_stage(const StageContext& ctx, IntegratorState& state) {
        if (ctx.stage.duration <= 0.0) return;
        const double dt = stage_step(ctx);
        const long n = std::max<long>(1, static_cast<long>(std::ceil(ctx.stage.duration / dt)));
        const double h = ctx.stage.duration / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            const double t0 = static_cast<double>(k) * h;
            step_rk4(ctx, state, t0, h);
            // Keep the exact (anti)symmetry; roundoff otherwise accumulates.
            state.v = 0.5 * (state.v + state.v.transpose()).eval();
            state.s = 0.5 * (state.s - state.s.transpose()).eval();
            if (opts_.check_physicality)
                check_physicality(state, ctx.t_start + t0 + h);
        }
    }

private:
    double stage_step(const StageContext& ctx) const {
        double base = 0.01 / p_.kappa;
        if (!rwa_ && ctx.stage.coupling != 0.0)
            base = std::min(base, 0.02 / p_.omega_m);
        if (opts_.dt > 0.0) {
            if (opts_.dt > base * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "propagation step " << opts_.dt << " too large; this configuration needs dt <= " << base;
                throw ConfigError(msg.str());
            }
            return opts_.dt;
        }
        return base;
    }

    void build_drift(Mat8& a, const StageContext& ctx, double t_local) const {
        a.setZero();
        a(XC, XC) = a(YC, YC) = -p_.kappa;
        a(XM, XM) = a(YM, YM) = -0.5 * p_.gamma;
        const double g = ctx.stage.coupling;
        if (g != 0.0) {
            a(XC, XM) -= g;
            a(YC, YM) -= g;
            a(XM, XC) += g;
            a(YM, YC) += g;
            if (!rwa_) {
                const double phase = 2.0 * p_.omega_m * (ctx.t_start + t_local);
                const double c = g * std::cos(phase);
                const double s = g * std::sin(phase);
                a(XC, XM) += c;
                a(XC, YM) += s;
                a(YC, XM) += s;
                a(YC, YM) -= c;
                a(XM, XC) += c;
                a(XM, YC) += s;
                a(YM, XC) += s;
                a(YM, YC) -= c;
            }
        }
        if (ctx.stage.kind == PulseStage::Kind::Readout && ctx.mode) {
            const double fe = ctx.mode->envelope(t_local) * std::sqrt(2.0 * p_.kappa_e);
            a(XB, XC) = fe;
            a(YB, YC) = fe;
        }
    }

    void build_noise(Mat86& b, const StageContext& ctx, double t_local) const {
        b.setZero();
        const double root_ext = std::sqrt(2.0 * p_.kappa_e);
        const double root_int = std::sqrt(2.0 * (p_.kappa - p_.kappa_e));
        b(XC, IN_X) = b(YC, IN_Y) = root_ext;
        b(XC, VAC_X) = b(YC, VAC_Y) = root_int;
        const double root_g = std::sqrt(p_.gamma);
        b(XM, TH_X) = b(YM, TH_Y) = root_g;
        if (!ctx.mode) return;
        const double f = ctx.mode->envelope(t_local);
        if (ctx.stage.kind == PulseStage::Kind::Upload) {
            b(XA, IN_X) = f;
            b(YA, IN_Y) = f;
        } else if (ctx.stage.kind == PulseStage::Kind::Readout) {
            // Input-output relation a_out = -a_in + sqrt(2 kappa_e) a_c: the
            // direct reflection enters the accumulator with the noise port.
            b(XB, IN_X) = -f;
            b(YB, IN_Y) = -f;
        }
    }

    IntegratorState deriv(const StageContext& ctx, const IntegratorState& x, double t_local) const {
        Mat8 a;
        Mat86 b;
        build_drift(a, ctx, t_local);
        build_noise(b, ctx, t_local);

        IntegratorState d;
        d.m = a * x.m;
        if (ctx.stage.kind == PulseStage::Kind::Upload && ctx.mode &&
            (opts_.displace_x != 0.0 || opts_.displace_y != 0.0)) {
            Vec6 drive = Vec6::Zero();
            const double f = ctx.mode->envelope(t_local);
            drive[IN_X] = opts_.displace_x * f;
            drive[IN_Y] = opts_.displace_y * f;
            d.m += b * drive;
        }
        const Mat8 av = a * x.v;
        d.v = av + av.transpose() + b * n_sym_.asDiagonal() * b.transpose();
        const Mat8 as = a * x.s;
        d.s = as - as.transpose() + b * j_ * b.transpose();
        return d;
    }

    void step_rk4(const StageContext& ctx, IntegratorState& x, double t0, double h) const {
        const IntegratorState k1 = deriv(ctx, x, t0);
        const IntegratorState k2 = deriv(ctx, x + (0.5 * h) * k1, t0 + 0.5 * h);
        const IntegratorState k3 = deriv(ctx, x + (0.5 * h) * k2, t0 + 0.5 * h);
        const IntegratorState k4 = deriv(ctx, x + h * k3, t0 + h);
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    void check_physicality(const IntegratorState& x, double t_abs) const {
        using C8 = Eigen::Matrix<std::complex<double>, 8, 8>;
        C8 h = x.v.cast<std::complex<double>>() +
               std::complex<double>(0.0, 1.0) * x.s.cast<std::complex<double>>();
        const double tol = opts_.physicality_tol;
        C8 shifted = h + tol * C8::Identity();
        Eigen::LLT<C8> llt(shifted);
        if (llt.info() == Eigen::Success) return;
        Eigen::SelfAdjointEigenSolver<C8> es(h, Eigen::EigenvaluesOnly);
        const double min_eig = es.eigenvalues().minCoeff();
        if (min_eig < -tol) {
            std::ostringstream msg;
            msg << "covariance physicality violated at t = " << t_abs
                << ": min eigenvalue of V + i Sigma is " << min_eig;
            throw PhysicalityError(msg.str());
        }
    }

    const SystemParams& p_;
    bool rwa_;
    PropagationOptions opts_;
    Mat6 j_;
    Vec6 n_sym_;
};

void validate_mode_on_stage(const TemporalMode& mode, double stage_duration, const char* which) {
    const double tol = 1e-9 * std::max(1.0, stage_duration);
    if (std::abs(mode.duration() - stage_duration) > tol)
        throw std::invalid_argument(std::string(which) +
                                    " temporal mode is not normalized on its stage "
                                    "(duration mismatch)");
    // Simpson check of the envelope normalization; closed form says 1.
    const int n = 2000;
    const double h = mode.duration() / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double f = mode.envelope(i * h);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f * f;
    }
    acc *= h / 3.0;
    if (std::abs(acc - 1.0) > 1e-6)
        throw std::invalid_argument(std::string(which) + " temporal mode is not normalized");
}

ExtractedChannel extract(const MomentState& st, bool have_in, bool have_out) {
    ExtractedChannel ch;
    if (!have_out) {
        ch.T_full = 0.0;
        ch.VN_full = 1.0; // nothing read out: the output mode is vacuum
        return ch;
    }
    ch.out_mean = st.mean.segment<2>(XB);
    const Eigen::Matrix2d cov_b = st.cov.block<2, 2>(XB, XB);
    if (have_in) {
        const Eigen::Matrix2d cov_a = st.cov.block<2, 2>(XA, XA);
        if ((cov_a - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-6)
            throw PhysicalityError("input temporal mode did not accumulate to vacuum variance 1");
        ch.transfer = st.cov.block<2, 2>(XB, XA);
        ch.T_full = 0.5 * (ch.transfer * ch.transfer.transpose()).trace();
    }
    if (ch.T_full > 1.0 + 1e-8)
        throw PhysicalityError("extracted transmittance exceeds 1");
    ch.T_full = std::min(ch.T_full, 1.0);

    const double om_t = 1.0 - ch.T_full;
    if (om_t < 1e-12) {
        ch.vn_singular = true;
        ch.VN_full = std::numeric_limits<double>::quiet_NaN();
        return ch;
    }
    const Eigen::Matrix2d residual = cov_b - ch.transfer * ch.transfer.transpose();
    const Eigen::Matrix2d vn_mat = residual / om_t;
    ch.VN_full = 0.5 * (vn_mat(0, 0) + vn_mat(1, 1));
    ch.xy_asymmetry = std::abs(vn_mat(0, 0) - vn_mat(1, 1));
    return ch;
}

PropagationResult propagate_impl(const SystemParams& params, const PulseSchedule& schedule,
                                 const TemporalMode* input_mode, const TemporalMode* output_mode,
                                 bool rwa, const PropagationOptions& opts) {
    params.validate();
    schedule.validate();
    if (input_mode) validate_mode_on_stage(*input_mode, schedule.tau1, "input");
    if (output_mode) validate_mode_on_stage(*output_mode, schedule.tau2, "output");

    const auto stages = make_stages(params, schedule);
    MomentPropagator prop(params, rwa, opts);

    IntegratorState state;
    {
        const MomentState init = prop.initial_state();
        state.m = init.mean;
        state.v = init.cov;
        state.s = init.comm;
    }

    PropagationResult result;
    double t_abs = 0.0;
    for (const PulseStage& stage : stages) {
        StageContext ctx;
        ctx.stage = stage;
        ctx.t_start = t_abs;
        if (stage.kind == PulseStage::Kind::Upload) ctx.mode = input_mode;
        if (stage.kind == PulseStage::Kind::Readout) ctx.mode = output_mode;
        prop.run_stage(ctx, state);
        t_abs += stage.duration;
        MomentState snap;
        snap.mean = state.m;
        snap.cov = state.v;
        snap.comm = state.s;
        result.stage_snapshots.push_back(snap);
    }
    result.final_state.mean = state.m;
    result.final_state.cov = state.v;
    result.final_state.comm = state.s;

    const bool have_in = input_mode != nullptr && schedule.tau1 > 0.0;
    const bool have_out = output_mode != nullptr && schedule.tau2 > 0.0;
    result.channel = extract(result.final_state, have_in, have_out);
    return result;
}

} // namespace

void PulseStage::validate() const {
    if (duration < 0.0)
        throw std::domain_error("PulseStage: duration must be >= 0");
    if (coupling < 0.0)
        throw std::domain_error("PulseStage: coupling must be >= 0");
    if (kind == Kind::Storage && coupling != 0.0)
        throw std::domain_error("PulseStage: storage stage must have zero coupling");
}

std::array<PulseStage, 3> make_stages(const SystemParams& params, const PulseSchedule& schedule) {
    params.validate();
    schedule.validate();
    std::array<PulseStage, 3> stages;
    stages[0] = {PulseStage::Kind::Upload, schedule.tau1, params.g1};
    stages[1] = {PulseStage::Kind::Storage, schedule.tau_s, 0.0};
    stages[2] = {PulseStage::Kind::Readout, schedule.tau2, params.g2};
    for (const auto& st : stages) st.validate();
    return stages;
}

TemporalMode::TemporalMode(Shape shape, double rate_G, double duration)
    : shape_(shape), rate_G_(rate_G), duration_(duration) {
    if (rate_G < 0.0)
        throw std::domain_error("TemporalMode: rate must be >= 0");
    if (!(duration > 0.0))
        throw std::domain_error("TemporalMode: duration must be positive");
    if (rate_G_ > 0.0)
        end_value_ = std::sqrt(2.0 * rate_G_ / (-std::expm1(-2.0 * rate_G_ * duration_)));
    else
        end_value_ = std::sqrt(1.0 / duration_);
}

double TemporalMode::envelope(double t) const {
    // Evaluated from the large end so the exponential never overflows.
    if (shape_ == Shape::RisingExp)
        return end_value_ * std::exp(-rate_G_ * (duration_ - t));
    return end_value_ * std::exp(-rate_G_ * t);
}

double TemporalMode::normalization() const {
    if (shape_ == Shape::RisingExp)
        return end_value_ * std::exp(-rate_G_ * duration_);
    return end_value_;
}

std::pair<TemporalMode, TemporalMode> adiabatic_envelopes(double G1, double G2,
                                                          double tau1, double tau2) {
    if (!(G1 > 0.0) || !(G2 > 0.0))
        throw std::domain_error("adiabatic_envelopes: rates must be positive");
    if (!(tau1 > 0.0) || !(tau2 > 0.0))
        throw std::domain_error("adiabatic_envelopes: durations must be positive");
    return {TemporalMode(TemporalMode::Shape::RisingExp, G1, tau1),
            TemporalMode(TemporalMode::Shape::FallingExp, G2, tau2)};
}

ExtractedChannel propagate_rwa(const SystemParams& params, const PulseSchedule& schedule,
                               const TemporalMode& input_mode, const TemporalMode& output_mode,
                               const PropagationOptions& opts) {
    return propagate_impl(params, schedule, &input_mode, &output_mode, true, opts).channel;
}

ExtractedChannel propagate_full(const SystemParams& params, const PulseSchedule& schedule,
                                const TemporalMode& input_mode, const TemporalMode& output_mode,
                                const PropagationOptions& opts) {
    return propagate_impl(params, schedule, &input_mode, &output_mode, false, opts).channel;
}

PropagationResult propagate_moments(const SystemParams& params, const PulseSchedule& schedule,
                                    const TemporalMode& input_mode, const TemporalMode& output_mode,
                                    bool rwa, const PropagationOptions& opts) {
    return propagate_impl(params, schedule, &input_mode, &output_mode, rwa, opts);
}

ExtractedChannel extract_channel(const SystemParams& params, const PulseSchedule& schedule,
                                 bool rwa, const PropagationOptions& opts) {
    params.validate();
    schedule.validate();
    std::optional<TemporalMode> in_mode, out_mode;
    if (schedule.tau1 > 0.0)
        in_mode.emplace(TemporalMode::Shape::RisingExp, params.g1 * params.g1 / params.kappa,
                        schedule.tau1);
    if (schedule.tau2 > 0.0)
        out_mode.emplace(TemporalMode::Shape::FallingExp, params.g2 * params.g2 / params.kappa,
                         schedule.tau2);
    if (!out_mode) {
        ExtractedChannel ch;
        ch.T_full = 0.0;
        ch.VN_full = 1.0;
        return ch;
    }
    return propagate_impl(params, schedule, in_mode ? &*in_mode : nullptr, &*out_mode, rwa, opts)
        .channel;
}

Eigen::Matrix2d storage_evolution(const Eigen::Matrix2d& mech_cov, double gamma,
                                  double tau_s, double n_th) {
    if (gamma < 0.0 || tau_s < 0.0 || n_th < 0.0)
        throw std::domain_error("storage_evolution: gamma, tau_s, n_th must be >= 0");
    const double delta = std::exp(-gamma * tau_s);
    return delta * mech_cov + (1.0 - delta) * (2.0 * n_th + 1.0) * Eigen::Matrix2d::Identity();
}

} // namespace omch
