#pragma once

#include <stdexcept>
#include <string>

namespace omch {

/// Effective transmittance reached 1; the added-noise formula has a pole there.
class SingularChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested Fock truncation cannot hold the state to the required tail bound.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int suggested)
        : std::runtime_error(what), suggested_dim(suggested) {}
    int suggested_dim;
};

/// Bad run configuration (unknown key, out-of-range value, invalid step size...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Covariance matrix lost physicality (V + i*Sigma dropped below -tol) during
/// moment propagation; indicates an integrator or model error.
class PhysicalityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace omch
