/**
 * @file force_field.hpp
 * @brief Deadbanded, saturating assistive torque law.
 *
 * Angles and errors are in degrees, g in deg^-2 and torque in N*m, so the
 * exponent g * dtheta^2 is dimensionless.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "pi2aan/error.hpp"

namespace pi2aan {

struct ForceFieldConfig {
    double tau_max = 5.0;   // N*m
    double deadband = 1.0;  // deg

    void validate() const {
        if (!(tau_max > 0.0)) throw ConfigError("tau_max must be > 0");
        if (!(deadband >= 0.0)) throw ConfigError("deadband must be >= 0");
    }
};

struct TrackingError {
    double raw = 0.0;         // desired - measured
    double deadbanded = 0.0;  // shrunk toward zero by the deadband half-width
};

inline TrackingError deadband_error(double desired, double measured, double deadband) {
    const double raw = desired - measured;
    const double mag = std::abs(raw);
    if (mag < deadband) return {raw, 0.0};
    return {raw, std::copysign(mag - deadband, raw)};
}

/// Restoring torque tau_max * (1 - exp(-g * dtheta^2)) with the sign of the
/// deadbanded error. `g` must already be clamped to be non-negative.
inline double assist_torque(const TrackingError& err, double g, const ForceFieldConfig& cfg) {
    if (g < 0.0) throw DomainError("impedance g must be >= 0 at actuation, got " + std::to_string(g));
    const double d = err.deadbanded;
    if (d == 0.0) return 0.0;
    // -expm1(-x) keeps precision for tiny g*d^2; the cap keeps |tau| < tau_max
    // once exp(-x) underflows
    const double mag = std::min(-cfg.tau_max * std::expm1(-g * d * d), std::nextafter(cfg.tau_max, 0.0));
    return std::copysign(mag, d);
}

}  // namespace pi2aan
