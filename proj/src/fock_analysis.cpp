#include "omch/fock_analysis.hpp"

#include "omch/channel_core.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace omch {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_choose(int n, int k) {
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

/// log of r^pow_r * t^pow_t * base, returning -inf for dead terms (0^positive).
double log_power_term(double log_base, int pow_r, double ln_r, bool r_zero,
                      int pow_t, double ln_t, bool t_zero) {
    if (r_zero && pow_r > 0) return -std::numeric_limits<double>::infinity();
    if (t_zero && pow_t > 0) return -std::numeric_limits<double>::infinity();
    double L = log_base;
    if (pow_r > 0) L += pow_r * ln_r;
    if (pow_t > 0) L += pow_t * ln_t;
    return L;
}

/// <j, n+1-j| B |1, n> for a beamsplitter with amplitude transmittance t,
/// reflectance r. Expansion of (t a^dag + r b^dag)(-r a^dag + t b^dag)^n |00>.
double beamsplitter_amp(int j, int n, double t, double r, double ln_t, double ln_r) {
    const bool t_zero = (t == 0.0);
    const bool r_zero = (r == 0.0);
    const double log_norm = 0.5 * (log_factorial(j) + log_factorial(n + 1 - j) - log_factorial(n));
    double amp = 0.0;
    if (j >= 1) {
        const double L = log_power_term(log_choose(n, j - 1) + log_norm,
                                        j - 1, ln_r, r_zero, n - j + 2, ln_t, t_zero);
        const double sign = (j - 1) % 2 == 0 ? 1.0 : -1.0;
        amp += sign * std::exp(L);
    }
    if (j <= n) {
        const double L = log_power_term(log_choose(n, j) + log_norm,
                                        j + 1, ln_r, r_zero, n - j, ln_t, t_zero);
        const double sign = j % 2 == 0 ? 1.0 : -1.0;
        amp += sign * std::exp(L);
    }
    return amp;
}

} // namespace

void GaussianChannelSpec::validate() const {
    if (!(T >= 0.0) || T > 1.0)
        throw std::domain_error("GaussianChannelSpec: T must lie in [0, 1]");
    if (!(VN >= 1.0))
        throw std::domain_error("GaussianChannelSpec: VN must be >= 1");
}

FockState::FockState(Eigen::VectorXd probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0)
        throw std::domain_error("FockState: empty probability vector");
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (probs_[i] < -1e-10)
            throw std::domain_error("FockState: negative probability");
        if (probs_[i] < 0.0) probs_[i] = 0.0;
    }
    if (probs_.sum() > 1.0 + 1e-9)
        throw std::domain_error("FockState: trace exceeds 1");
}

FockState FockState::vacuum(int dim) { return fock(0, dim); }

FockState FockState::fock(int n, int dim) {
    if (n < 0 || dim <= n)
        throw std::domain_error("FockState::fock: need 0 <= n < dim");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    p[n] = 1.0;
    return FockState(std::move(p));
}

double FockState::trace_deficit() const {
    return std::max(0.0, 1.0 - trace());
}

FockState apply_channel_single_photon(const GaussianChannelSpec& spec,
                                      const ChannelTruncation& trunc) {
    spec.validate();
    if (trunc.dim < 0)
        throw std::domain_error("apply_channel_single_photon: dim must be >= 0");
    if (!(trunc.tail_tol > 0.0))
        throw std::domain_error("apply_channel_single_photon: tail_tol must be positive");

    const double nbar = (spec.VN - 1.0) / 2.0;
    const double ratio = nbar > 0.0 ? nbar / (1.0 + nbar) : 0.0;

    // Smallest ancilla cutoff with residual thermal weight ratio^(n_cut+1) < tail_tol.
    int n_cut = 0;
    if (ratio > 0.0)
        n_cut = std::max(0, static_cast<int>(std::ceil(std::log(trunc.tail_tol) / std::log(ratio))) - 1);
    const int required_dim = n_cut + 2; // output holds at most n_cut + 1 photons

    int out_dim;
    if (trunc.dim == 0) {
        out_dim = std::max(60, required_dim);
        if (out_dim > trunc.max_dim)
            throw TruncationError("apply_channel_single_photon: required dimension " +
                                      std::to_string(required_dim) + " exceeds max_dim",
                                  required_dim);
    } else {
        if (trunc.dim < required_dim)
            throw TruncationError("apply_channel_single_photon: thermal tail beyond dim " +
                                      std::to_string(trunc.dim) + " exceeds tail tolerance; need dim >= " +
                                      std::to_string(required_dim),
                                  required_dim);
        out_dim = trunc.dim;
    }

    const double t = std::sqrt(spec.T);
    const double r = std::sqrt(1.0 - spec.T);
    const double ln_t = t > 0.0 ? std::log(t) : 0.0;
    const double ln_r = r > 0.0 ? std::log(r) : 0.0;

    Eigen::VectorXd probs = Eigen::VectorXd::Zero(out_dim);
    double q = 1.0 / (1.0 + nbar); // thermal weight of ancilla level n
    for (int n = 0; n <= n_cut; ++n) {
        for (int j = 0; j <= n + 1 && j < out_dim; ++j) {
            const double amp = beamsplitter_amp(j, n, t, r, ln_t, ln_r);
            probs[j] += q * amp * amp;
        }
        q *= ratio;
    }
    return FockState(std::move(probs));
}

FockState apply_channel_single_photon(const GaussianChannelSpec& spec, int dim) {
    ChannelTruncation trunc;
    trunc.dim = dim;
    return apply_channel_single_photon(spec, trunc);
}

double wigner_at_origin(const FockState& state) {
    double parity = 0.0;
    for (int m = 0; m < state.dim(); ++m)
        parity += (m % 2 == 0 ? 1.0 : -1.0) * state.p(m);
    return parity / kTwoPi;
}

namespace {

/// W(x, y) of a Fock-diagonal state via the scaled Laguerre recurrence
/// S_m = L_m(u) e^{-u/2}, u = x^2 + y^2.
double wigner_value(const Eigen::VectorXd& probs, double u) {
    const int dim = static_cast<int>(probs.size());
    double s_prev = std::exp(-0.5 * u); // m = 0
    double acc = probs[0] * s_prev;
    if (dim == 1) return acc / kTwoPi;
    double s_cur = (1.0 - u) * s_prev; // m = 1
    acc -= probs[1] * s_cur;
    double sign = 1.0;
    for (int m = 1; m + 1 < dim; ++m) {
        const double s_next = ((2.0 * m + 1.0 - u) * s_cur - m * s_prev) / (m + 1.0);
        acc += sign * probs[m + 1] * s_next;
        sign = -sign;
        s_prev = s_cur;
        s_cur = s_next;
    }
    return acc / kTwoPi;
}

} // namespace

WignerGrid wigner_of_state(const FockState& state, const WignerGridSpec& grid) {
    if (grid.nx < 2 || grid.ny < 2)
        throw std::domain_error("wigner_of_state: grid needs at least 2 points per axis");

    double mean_n = 0.0;
    for (int m = 0; m < state.dim(); ++m) mean_n += m * state.p(m);
    const double sigma = std::sqrt(2.0 * mean_n + 1.0);
    const double hw_x = grid.half_width_x > 0.0 ? grid.half_width_x : 6.0 * sigma;
    const double hw_y = grid.half_width_y > 0.0 ? grid.half_width_y : 6.0 * sigma;

    WignerGrid out;
    out.x_axis = Eigen::VectorXd::LinSpaced(grid.nx, -hw_x, hw_x);
    out.y_axis = Eigen::VectorXd::LinSpaced(grid.ny, -hw_y, hw_y);
    out.values.resize(grid.nx, grid.ny);
    for (int i = 0; i < grid.nx; ++i) {
        const double x = out.x_axis[i];
        for (int j = 0; j < grid.ny; ++j) {
            const double y = out.y_axis[j];
            out.values(i, j) = wigner_value(state.probs(), x * x + y * y);
        }
    }

    // Trapezoid rule; edge weights 1/2.
    const double dx = out.x_axis[1] - out.x_axis[0];
    const double dy = out.y_axis[1] - out.y_axis[0];
    double integral = 0.0;
    for (int i = 0; i < grid.nx; ++i) {
        const double wi = (i == 0 || i == grid.nx - 1) ? 0.5 : 1.0;
        for (int j = 0; j < grid.ny; ++j) {
            const double wj = (j == 0 || j == grid.ny - 1) ? 0.5 : 1.0;
            integral += wi * wj * out.values(i, j);
        }
    }
    out.integral = integral * dx * dy;
    out.normalized = std::abs(out.integral - 1.0) <= 1e-3;
    return out;
}

bool negativity_preserved(const GaussianChannelSpec& spec) {
    spec.validate();
    if (spec.T >= 1.0)
        throw std::domain_error("negativity_preserved: T must be < 1");
    return spec.VN < negativity_threshold(spec.T);
}

NonGaussBoundaryPoint nongauss_boundary(double r) {
    if (r < 0.0)
        throw std::domain_error("nongauss_boundary: r must be >= 0");
    // e^r sinh r = (e^{2r} - 1) / 2
    const double expo = std::exp(-0.5 * std::expm1(2.0 * r));
    const double ch = std::cosh(r);
    NonGaussBoundaryPoint pt;
    pt.r = r;
    pt.p0 = expo / ch;
    pt.p1G = 0.25 * std::expm1(4.0 * r) * expo / (ch * ch * ch);
    return pt;
}

double p1G_of_p0(double p0) {
    if (!(p0 > 0.0) || p0 > 1.0)
        throw std::domain_error("p1G_of_p0: p0 must lie in (0, 1]");
    if (p0 == 1.0) return 0.0;
    // p0(r) is strictly decreasing; maintain p0(lo) >= p0 >= p0(hi).
    double lo = 0.0, hi = 30.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (nongauss_boundary(mid).p0 >= p0)
            lo = mid;
        else
            hi = mid;
    }
    return nongauss_boundary(0.5 * (lo + hi)).p1G;
}

NonGaussVerdict nongauss_certified(const FockState& state) {
    const double p0 = std::min(state.p(0), 1.0);
    const double p1 = state.p(1);
    const double bound = p0 > 0.0 ? p1G_of_p0(p0) : 0.0;
    NonGaussVerdict v;
    v.margin = p1 - bound;
    v.certified = v.margin > 0.0;
    return v;
}

FockTriple fock_triple(const FockState& state) {
    FockTriple t;
    t.p0 = state.p(0);
    t.p1 = state.p(1);
    t.p2plus = 1.0 - t.p0 - t.p1;
    return t;
}

} // namespace omch
