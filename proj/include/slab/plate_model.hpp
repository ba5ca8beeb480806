#pragma once

// Closed-form physics of a thin Kelvin-Voigt damped plate carrying flexural waves.
//
// Conventions: omega is always angular frequency in rad/s. Fields propagate as
// exp(j(k x - omega t)), so forward transforms use exp(+j omega t).

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "slab/error.hpp"

namespace slab {

/// Low-loss expansion of the wavenumber is trusted while theta*omega stays below this.
inline constexpr double kLowLossLimit = 0.1;

struct PlateMaterial {
    double youngs_modulus = 24e9;  // Pa
    double density = 2500.0;       // kg/m^3
    double poisson = 0.2;
    double thickness = 0.2;        // m
    double damping_theta = 1e-5;   // s

    friend bool operator==(const PlateMaterial&, const PlateMaterial&) = default;

    void validate() const {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(youngs_modulus) || !positive(density) || !positive(thickness) ||
            !positive(damping_theta))
            throw Error(ErrorKind::NonPhysical, "material parameters must be finite and > 0");
        if (!(poisson > 0.0 && poisson < 0.5))
            throw Error(ErrorKind::NonPhysical, "poisson ratio must lie in (0, 0.5)");
    }

    /// True when the whole band [0, omega_max] is inside the low-loss regime.
    bool low_loss_valid(double omega_max) const { return damping_theta * omega_max < kLowLossLimit; }
};

struct PlateConstants {
    double bending_stiffness = 0.0;  // D, N m
    double dispersion_a = 0.0;       // a = sqrt(D / (rho h)), m^2/s
    double loss_gamma = 0.0;         // theta / (4 sqrt(a)), s^(3/2) m^(-1)
    double amp_alpha_mag = 0.0;      // |alpha| = pi a^(3/2) / (2 D)
};

namespace detail {
inline PlateConstants finish_constants(double D, double a, double theta) {
    PlateConstants c{D, a, theta / (4.0 * std::sqrt(a)),
                     std::numbers::pi * std::pow(a, 1.5) / (2.0 * D)};
    if (!std::isfinite(c.bending_stiffness) || !std::isfinite(c.dispersion_a) ||
        !std::isfinite(c.loss_gamma) || !std::isfinite(c.amp_alpha_mag) || !(c.bending_stiffness > 0) ||
        !(c.dispersion_a > 0) || !(c.amp_alpha_mag > 0))
        throw Error(ErrorKind::NonPhysical, "derived plate constants are not finite and positive");
    return c;
}
}  // namespace detail

inline PlateConstants derive_constants(const PlateMaterial& m) {
    m.validate();
    const double D = m.youngs_modulus * m.thickness * m.thickness * m.thickness /
                     (12.0 * (1.0 - m.poisson * m.poisson));
    const double a = std::sqrt(D / (m.density * m.thickness));
    return detail::finish_constants(D, a, m.damping_theta);
}

/// Constants pinned to a given dispersion coefficient `a` (e.g. the rounded 183 m^2/s)
/// while keeping the bending stiffness that scales the amplitude.
inline PlateConstants constants_from_dispersion(double a, double bending_stiffness, double theta) {
    if (!(a > 0.0) || !(bending_stiffness > 0.0) || !(theta >= 0.0))
        throw Error(ErrorKind::NonPhysical, "dispersion coefficient and stiffness must be > 0");
    return detail::finish_constants(bending_stiffness, a, theta);
}

struct Wavenumber {
    double real = 0.0;  // k_R, rad/m
    double imag = 0.0;  // k_I, attenuation 1/m
};

/// Low-loss wavenumber k = sqrt(omega/a) (1 + j theta omega / 4).
inline Wavenumber wavenumber(double omega, const PlateConstants& c, double theta,
                             Diagnostics* diag = nullptr) {
    if (omega < 0.0) throw Error(ErrorKind::InvalidArgument, "omega must be >= 0");
    if (theta * omega >= kLowLossLimit) {
        std::ostringstream msg;
        msg << "loss factor theta*omega = " << theta * omega << " exceeds " << kLowLossLimit;
        warn(diag, WarningKind::LossFactorTooLarge, msg.str());
    }
    const double kr = std::sqrt(omega / c.dispersion_a);
    return {kr, 0.25 * theta * omega * kr};
}

inline double group_velocity(double omega, const PlateConstants& c) {
    if (omega < 0.0) throw Error(ErrorKind::InvalidArgument, "omega must be >= 0");
    return 2.0 * std::sqrt(c.dispersion_a) * std::sqrt(omega);
}

/// Stationary-phase envelope A(d, t) of the packet radiated by the derivative pulse.
inline double envelope(double d, double t, const PlateConstants& c, double theta) {
    if (!(d > 0.0) || !(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "envelope needs d > 0, t > 0");
    const double a = c.dispersion_a;
    const double scale = c.amp_alpha_mag * a / (2.0 * std::numbers::sqrt2);
    const double d2 = d * d;
    return scale * d2 * std::pow(t, -2.5) * std::exp(-(theta / (32.0 * a * a)) * d2 * d2 / (t * t * t));
}

/// Frequency at which the phase k_R(omega) d - omega t is stationary.
inline double stationary_frequency(double d, double t, const PlateConstants& c) {
    if (!(d >= 0.0) || !(t > 0.0)) throw Error(ErrorKind::InvalidArgument, "need d >= 0, t > 0");
    const double r = d / (2.0 * std::sqrt(c.dispersion_a) * t);
    return r * r;
}

/// Time at which the envelope maximum over distance sits at d: t = (theta d^4 / (16 a^2))^(1/3).
inline double envelope_max_toa(double d, const PlateConstants& c, double theta) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "distance must be > 0");
    if (!(theta > 0.0)) throw Error(ErrorKind::ZeroDamping, "envelope maximum undefined without damping");
    const double a = c.dispersion_a;
    return std::cbrt(theta * d * d * d * d / (16.0 * a * a));
}

/// Perceived propagation velocity d / t along the envelope-maximum locus, (16 a^2 / (theta d))^(1/3).
inline double perceived_velocity(double d, const PlateConstants& c, double theta) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "distance must be > 0");
    if (!(theta > 0.0)) throw Error(ErrorKind::ZeroDamping, "perceived velocity undefined without damping");
    const double a = c.dispersion_a;
    return std::cbrt(16.0 * a * a / (theta * d));
}

/// Time at which A(d, .) peaks for a fixed observer at distance d: (3 theta d^4 / (80 a^2))^(1/3).
/// Earlier than envelope_max_toa(d) by the factor (3/5)^(1/3).
inline double envelope_peak_time(double d, const PlateConstants& c, double theta) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "distance must be > 0");
    if (!(theta > 0.0)) throw Error(ErrorKind::ZeroDamping, "envelope peak undefined without damping");
    const double a = c.dispersion_a;
    return std::cbrt(3.0 * theta * d * d * d * d / (80.0 * a * a));
}

enum class PulseKind { F1, F1Derivative };

struct Pulse {
    PulseKind kind = PulseKind::F1;
    double duration = 1e-3;  // T, s
};

/// f1(t) = sin(2 pi t / T) - 0.5 sin(4 pi t / T) on [0, T], or its time derivative.
inline double pulse_value(const Pulse& p, double t) {
    if (!(p.duration > 0.0)) throw Error(ErrorKind::InvalidArgument, "pulse duration must be > 0");
    if (t < 0.0 || t > p.duration) return 0.0;
    const double w1 = 2.0 * std::numbers::pi / p.duration;
    if (p.kind == PulseKind::F1) return std::sin(w1 * t) - 0.5 * std::sin(2.0 * w1 * t);
    return w1 * (std::cos(w1 * t) - std::cos(2.0 * w1 * t));
}

namespace detail {
// Integral over [0, T] of sin(b t) exp(j w t), with b T a multiple of 2 pi.
inline std::complex<double> sine_segment_transform(double b, double w, double T) {
    using namespace std::complex_literals;
    const double gap = b * b - w * w;
    if (std::abs(w - b) < 1e-9 * b) return 0.5i * T;
    if (std::abs(w + b) < 1e-9 * b) return -0.5i * T;
    return b * (1.0 - std::exp(1i * w * T)) / gap;
}
}  // namespace detail

/// Fourier transform F(w) = integral f(t) exp(+j w t) dt of the pulse. For F1 this equals
/// -(3 j T / 4 pi) e^{j w T/2} sin(w T/2) / ([1 - (w T/2 pi)^2][1 - (w T/4 pi)^2]).
inline std::complex<double> pulse_spectrum(const Pulse& p, double omega) {
    using namespace std::complex_literals;
    if (!(p.duration > 0.0)) throw Error(ErrorKind::InvalidArgument, "pulse duration must be > 0");
    const double T = p.duration;
    const double w1 = 2.0 * std::numbers::pi / T;
    const double x = omega * T;
    const double r1 = x / (2.0 * std::numbers::pi);
    const double r2 = x / (4.0 * std::numbers::pi);
    const double den = (1.0 - r1 * r1) * (1.0 - r2 * r2);
    std::complex<double> f1;
    if (std::abs(den) > 1e-6) {
        f1 = -(3.0i * T / (4.0 * std::numbers::pi)) * std::exp(0.5i * x) * std::sin(0.5 * x) / den;
    } else {
        f1 = detail::sine_segment_transform(w1, omega, T) -
             0.5 * detail::sine_segment_transform(2.0 * w1, omega, T);
    }
    if (p.kind == PulseKind::F1) return f1;
    return -1.0i * omega * f1;
}

}  // namespace slab
