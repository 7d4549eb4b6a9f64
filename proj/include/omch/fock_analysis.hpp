#pragma once

#include <Eigen/Dense>

#include "omch/errors.hpp"

namespace omch {

/// Virtual-beamsplitter channel acting on the recovered mode: transmittance T,
/// noise port in a thermal state of quadrature variance VN (shot-noise units).
struct GaussianChannelSpec {
    double T = 0.0;
    double VN = 1.0;

    void validate() const; // T in [0,1], VN >= 1
};

/// State of the recovered optical mode, diagonal in the Fock basis.
/// A phase-insensitive Gaussian channel keeps Fock-diagonal inputs diagonal,
/// and every state this library produces is of that kind, so only the
/// diagonal of rho is stored. Trace may fall short of 1 by the truncation
/// deficit, which fock_triple() folds into p2plus.
class FockState {
public:
    FockState() = default;
    explicit FockState(Eigen::VectorXd probs);

    static FockState vacuum(int dim);
    static FockState fock(int n, int dim);

    int dim() const { return static_cast<int>(probs_.size()); }
    double p(int m) const { return m < dim() ? probs_[m] : 0.0; }
    const Eigen::VectorXd& probs() const { return probs_; }
    double trace() const { return probs_.sum(); }
    double trace_deficit() const;

private:
    Eigen::VectorXd probs_;
};

/// Truncation policy for apply_channel_single_photon.
///   dim == 0  : size the state automatically (at least 60) so that the
///               neglected thermal tail stays below tail_tol;
///   dim  > 0  : truncate at exactly dim; throws TruncationError (carrying a
///               suggested dimension) if the tail beyond dim exceeds tail_tol.
struct ChannelTruncation {
    int dim = 0;
    double tail_tol = 1e-10;
    int max_dim = 8192;
};

/// Send a single photon through the effective channel: beamsplitter of
/// transmittance T with the ancilla port in a thermal state of variance VN,
/// ancilla traced out. Exact per-element contraction over the two-mode
/// truncated Fock space.
FockState apply_channel_single_photon(const GaussianChannelSpec& spec,
                                      const ChannelTruncation& trunc);
FockState apply_channel_single_photon(const GaussianChannelSpec& spec, int dim = 0);

struct WignerGridSpec {
    int nx = 201;
    int ny = 201;
    double half_width_x = 0.0; ///< 0 = auto: 6 standard deviations
    double half_width_y = 0.0;
};

/// Wigner samples on a uniform grid. Convention: vacuum quadrature variance 1,
/// W_vac(x, y) = exp(-(x^2+y^2)/2) / (2 pi).
struct WignerGrid {
    Eigen::VectorXd x_axis;
    Eigen::VectorXd y_axis;
    Eigen::MatrixXd values; ///< values(i, j) = W(x_axis[i], y_axis[j])
    double integral = 0.0;  ///< trapezoid integral over the grid
    bool normalized = false; ///< integral within [0.999, 1.001]
};

WignerGrid wigner_of_state(const FockState& state, const WignerGridSpec& grid = {});

/// W(0, 0) = parity / (2 pi); cheap, no grid required.
double wigner_at_origin(const FockState& state);

/// True iff VN < T / (1 - T), the strict condition for the output Wigner
/// function of a single-photon input to stay negative at the origin.
bool negativity_preserved(const GaussianChannelSpec& spec);

/// Point on the quantum non-Gaussianity boundary,
///   p0(r) = exp(-e^r sinh r) / cosh r,
///   p1G(r) = (e^{4r} - 1)/4 * exp(-e^r sinh r) / cosh^3 r.
struct NonGaussBoundaryPoint {
    double r;
    double p0;
    double p1G;
};

NonGaussBoundaryPoint nongauss_boundary(double r);

/// Largest single-photon probability a mixture of Gaussian states can have at
/// a given vacuum probability. Inverts p0(r) by bisection (p0 is strictly
/// decreasing), then evaluates p1G. Domain: p0 in (0, 1].
double p1G_of_p0(double p0);

struct NonGaussVerdict {
    double margin = 0.0;    ///< p1 - p1G(p0)
    bool certified = false; ///< margin > 0: no Gaussian mixture reproduces (p0, p1)
};

NonGaussVerdict nongauss_certified(const FockState& state);

struct FockTriple {
    double p0;
    double p1;
    double p2plus; ///< 1 - p0 - p1; absorbs the truncation deficit
};

FockTriple fock_triple(const FockState& state);

} // namespace omch
