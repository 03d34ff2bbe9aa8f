#pragma once

#include <stdexcept>
#include <string>

namespace jt {

/// Bad user input: malformed config files, invalid CLI arguments.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameters outside the physically meaningful regime of the model.
struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A boson mode energy came out <= 0; all downstream formulas need
/// a strictly positive spectrum.
struct NonPositiveSpectrum : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// The lower Bogoliubov branch went imaginary: the supplied mean-field
/// point is not a minimum of the energy surface.
struct GaplessMode : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Omega = 0 with sin(theta) = 0: the rotated-frame spin gap
/// Omega/|sin theta| is indeterminate in the closed-form expressions.
struct UndefinedGap : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Quadratic form indefinite beyond tolerance.
struct NotAMinimum : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Root bracketing failed in a scan.
struct NoBracket : PhysicsError {
    using PhysicsError::PhysicsError;
};

/// Iterative solver exhausted its budget; carries the best residual seen.
struct NonConvergence : std::runtime_error {
    double residual;
    NonConvergence(const std::string& msg, double res)
        : std::runtime_error(msg + " (residual " + std::to_string(res) + ")"),
          residual(res) {}
};

} // namespace jt
