#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "slab/envelope_analysis.hpp"
#include "slab/plate_model.hpp"

using namespace slab;

namespace {

PlateConstants with_a(double a) { return constants_from_dispersion(a, 1.0e7, 1e-5); }

// Golden-section search for the maximum of f on [lo, hi]; independent of the Brent code under test.
template <typename F>
double golden_argmax(F f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(DeriveConstants, ConcreteSlabGivesA183) {
    const auto c = derive_constants(PlateMaterial{});
    EXPECT_NEAR(c.dispersion_a, 183.0, 1.0);
    EXPECT_NEAR(c.bending_stiffness, 1.6667e7, 1e3);
    // gamma = 1e-5 / (4 sqrt(182.574)) = 1.8502e-7, within 0.2% of the hand-rounded 1.848e-7.
    EXPECT_NEAR(c.loss_gamma, 1.8502e-7, 1e-10);
    EXPECT_NEAR(c.loss_gamma, 1.848e-7, 0.002 * 1.848e-7);
    EXPECT_NEAR(c.amp_alpha_mag, 2.3250e-4, 1e-7);
}

TEST(DeriveConstants, UnitNormalizingCase) {
    PlateMaterial m{.youngs_modulus = 12.0, .density = 1.0, .poisson = 1e-12, .thickness = 1.0, .damping_theta = 1e-5};
    const auto c = derive_constants(m);
    EXPECT_NEAR(c.bending_stiffness, 1.0, 1e-12);
    EXPECT_NEAR(c.dispersion_a, 1.0, 1e-12);
}

TEST(DeriveConstants, ASquaredTimesMassEqualsStiffness) {
    for (double h : {0.05, 0.1, 0.2, 0.3})
        for (double rho : {1800.0, 2500.0}) {
            PlateMaterial m;
            m.thickness = h;
            m.density = rho;
            const auto c = derive_constants(m);
            EXPECT_NEAR(c.dispersion_a * c.dispersion_a * rho * h / c.bending_stiffness, 1.0, 1e-12);
        }
}

TEST(DeriveConstants, RejectsNonPhysicalMaterial) {
    PlateMaterial m;
    m.poisson = 0.5;
    EXPECT_THROW(derive_constants(m), Error);
    m = {};
    m.thickness = 0.0;
    try {
        derive_constants(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonPhysical);
    }
    m = {};
    m.youngs_modulus = std::numeric_limits<double>::infinity();
    EXPECT_THROW(derive_constants(m), Error);
}

TEST(PlateMaterial, LowLossFlag) {
    PlateMaterial m;
    EXPECT_TRUE(m.low_loss_valid(9e3));
    EXPECT_FALSE(m.low_loss_valid(2.0 * std::numbers::pi * 10e3));
}

TEST(Wavenumber, UnitRealPartAtOmegaEqualsA) {
    const auto c = with_a(183.0);
    EXPECT_NEAR(wavenumber(183.0, c, 1e-5).real, 1.0, 1e-15);
}

TEST(Wavenumber, UndampedHasNoAttenuation) {
    const auto c = with_a(183.0);
    for (double w : {1.0, 100.0, 5e4}) EXPECT_EQ(wavenumber(w, c, 0.0).imag, 0.0);
}

TEST(Wavenumber, ImagPartMatchesExactQuarticRoot) {
    const auto c = with_a(183.0);
    const double w = 183.0, theta = 1e-5;
    const auto k = wavenumber(w, c, theta);
    EXPECT_NEAR(k.imag, 4.575e-4, 1e-12);
    // Exact root of -w^2 + a^2 (1 - j theta w) k^4 = 0 on the decaying branch.
    const std::complex<double> exact = std::sqrt(w / 183.0) * std::pow(std::complex<double>(1.0, -theta * w), -0.25);
    EXPECT_NEAR(k.imag / exact.imag(), 1.0, 1e-3);
    const auto residual = -w * w + 183.0 * 183.0 * std::complex<double>(1.0, -theta * w) * std::pow(exact, 4);
    EXPECT_LT(std::abs(residual), 1e-9 * w * w);
}

TEST(Wavenumber, AttenuationRatioIsExact) {
    const auto c = with_a(183.0);
    for (double w : {10.0, 300.0, 6000.0}) {
        const auto k = wavenumber(w, c, 1e-5);
        EXPECT_NEAR(k.imag / k.real, 1e-5 * w / 4.0, 1e-18);
    }
}

TEST(Wavenumber, WarnsOutsideLowLossRegime) {
    const auto c = with_a(183.0);
    Diagnostics diag;
    wavenumber(1e3, c, 1e-5, &diag);
    EXPECT_FALSE(diag.has(WarningKind::LossFactorTooLarge));
    wavenumber(2e4, c, 1e-5, &diag);
    EXPECT_TRUE(diag.has(WarningKind::LossFactorTooLarge));
}

TEST(GroupVelocity, Values) {
    const auto c = with_a(183.0);
    EXPECT_EQ(group_velocity(0.0, c), 0.0);
    EXPECT_NEAR(group_velocity(2.0 * std::numbers::pi * 1000.0, c), 2145.0, 1.0);
    EXPECT_NEAR(group_velocity(4000.0, c) / group_velocity(1000.0, c), 2.0, 1e-14);
}

TEST(GroupVelocity, MatchesFiniteDifferenceOfInvertedDispersion) {
    const auto c = with_a(183.0);
    // omega(k) = a k^2 from k_R = sqrt(omega / a); c_g = d omega / d k.
    for (double w : {500.0, 2.0 * std::numbers::pi * 1000.0, 3e4}) {
        const double k = wavenumber(w, c, 0.0).real, h = 1e-6 * k;
        auto omega_of = [&](double kk) { return 183.0 * kk * kk; };
        const double fd = (omega_of(k + h) - omega_of(k - h)) / (2.0 * h);
        EXPECT_NEAR(group_velocity(w, c) / fd, 1.0, 1e-8);
        EXPECT_NEAR(group_velocity(w, c) * k, 2.0 * w, 1e-9 * w);
    }
}

TEST(Envelope, DecaysAtLateTimes) {
    const auto c = with_a(183.0);
    EXPECT_LT(envelope(10.0, 10.0, c, 1e-5), 1e-3 * envelope(10.0, 0.01, c, 1e-5));
}

TEST(Envelope, UndampedScalesWithDSquared) {
    const auto c = with_a(183.0);
    EXPECT_NEAR(envelope(8.0, 0.01, c, 0.0) / envelope(4.0, 0.01, c, 0.0), 4.0, 1e-12);
}

TEST(Envelope, ArgmaxOverDistanceFollowsLocus) {
    const auto c = with_a(183.0);
    const double t = 5.712e-3;
    const double golden = golden_argmax([&](double d) { return envelope(d, t, c, 1e-5); }, 1.0, 40.0);
    EXPECT_NEAR(golden, 10.0, 0.05);
    EXPECT_NEAR(envelope_argmax_distance(t, c, 1e-5, 1.0, 40.0), golden, 1e-4);
}

TEST(Envelope, LocusAgreementProperty) {
    for (double a : {120.0, 183.0, 260.0})
        for (double theta : {3e-6, 1e-5, 1e-4}) {
            const auto c = with_a(a);
            for (double d = 5.0; d <= 20.0; d += 2.5) {
                const double t = envelope_max_toa(d, c, theta);
                const double est = golden_argmax([&](double x) { return envelope(x, t, c, theta); }, 0.2 * d, 5.0 * d);
                EXPECT_NEAR(est / d, 1.0, 0.005) << "a=" << a << " theta=" << theta << " d=" << d;
            }
        }
}

TEST(StationaryFrequency, ValueAndScaling) {
    const auto c = with_a(183.0);
    EXPECT_NEAR(stationary_frequency(10.0, 5.712e-3, c), 4186.0, 2.0);
    EXPECT_NEAR(stationary_frequency(10.0, 0.02, c) / stationary_frequency(10.0, 0.01, c), 0.25, 1e-14);
    EXPECT_EQ(stationary_frequency(0.0, 0.01, c), 0.0);
}

TEST(StationaryFrequency, ZeroOfPhaseDerivative) {
    const auto c = with_a(183.0);
    // Phi(omega) = k_R(omega) d - omega t; bisection on Phi'(omega) = 0.
    for (double d : {5.0, 10.0, 17.0})
        for (double t : {2e-3, 5.712e-3, 1.5e-2}) {
            auto dphi = [&](double w) {
                const double h = 1e-6 * w;
                return (std::sqrt((w + h) / 183.0) - std::sqrt((w - h) / 183.0)) * d / (2.0 * h) - t;
            };
            double lo = 1e-3, hi = 1e9;
            for (int it = 0; it < 200; ++it) {
                const double mid = std::sqrt(lo * hi);
                (dphi(mid) > 0.0 ? lo : hi) = mid;
            }
            EXPECT_NEAR(stationary_frequency(d, t, c) / lo, 1.0, 1e-6);
        }
}

TEST(PerceivedVelocity, ReferenceValues) {
    const auto c = with_a(183.0);
    // (16 * 183^2 / 1e-4)^(1/3) = 1749.876; the commonly quoted 1751 is 10 m / 5.71 ms with t rounded.
    EXPECT_NEAR(perceived_velocity(10.0, c, 1e-5), 1749.876, 1e-3);
    EXPECT_NEAR(perceived_velocity(10.0, c, 1e-5), 1751.0, 0.001 * 1751.0);
    EXPECT_NEAR(envelope_max_toa(10.0, c, 1e-5), 5.71e-3, 0.01e-3);
    EXPECT_NEAR(perceived_velocity(80.0, c, 1e-5) / perceived_velocity(10.0, c, 1e-5), 0.5, 1e-14);
}

TEST(PerceivedVelocity, VelocityTimesTimeIsDistance) {
    const auto c = derive_constants(PlateMaterial{});
    for (double d = 0.5; d < 60.0; d *= 1.37)
        EXPECT_NEAR(perceived_velocity(d, c, 1e-5) * envelope_max_toa(d, c, 1e-5), d, 1e-12 * d);
}

TEST(PerceivedVelocity, StrictlyDecreasingAndToaIncreasing) {
    const auto c = derive_constants(PlateMaterial{});
    double prev_c = std::numeric_limits<double>::infinity(), prev_t = 0.0;
    for (double d = 1.0; d <= 100.0; d += 0.25) {
        const double cp = perceived_velocity(d, c, 1e-5), t = envelope_max_toa(d, c, 1e-5);
        EXPECT_LT(cp, prev_c);
        EXPECT_GT(t, prev_t);
        prev_c = cp;
        prev_t = t;
    }
}

TEST(PerceivedVelocity, ToaFollowsFourThirdsPowerLaw) {
    const auto c = derive_constants(PlateMaterial{});
    // Least-squares slope of log t against log d.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double d = 2.0; d <= 50.0; d += 1.0, ++n) {
        const double x = std::log(d), y = std::log(envelope_max_toa(d, c, 1e-5));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    EXPECT_NEAR((n * sxy - sx * sy) / (n * sxx - sx * sx), 4.0 / 3.0, 1e-10);
}

TEST(PerceivedVelocity, ZeroDampingIsAnError) {
    const auto c = derive_constants(PlateMaterial{});
    try {
        perceived_velocity(10.0, c, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroDamping);
    }
    EXPECT_THROW(envelope_max_toa(10.0, c, 0.0), Error);
    EXPECT_THROW(envelope_max_toa(0.0, c, 1e-5), Error);
}

TEST(EnvelopePeakTime, IsTheFixedDistanceMaximum) {
    const auto c = with_a(183.0);
    for (double d : {5.0, 10.0, 20.0}) {
        const double tp = envelope_peak_time(d, c, 1e-5);
        const double golden = golden_argmax([&](double t) { return envelope(d, t, c, 1e-5); }, 1e-4, 0.1);
        EXPECT_NEAR(tp / golden, 1.0, 1e-6);
        EXPECT_NEAR(tp / envelope_max_toa(d, c, 1e-5), std::cbrt(0.6), 1e-12);
    }
}

TEST(Pulse, ValuesOnAndOffSupport) {
    const Pulse p{PulseKind::F1, 1e-3};
    EXPECT_NEAR(pulse_value(p, 0.25e-3), 1.0, 1e-15);
    EXPECT_NEAR(pulse_value(p, 0.5e-3), 0.0, 1e-15);
    EXPECT_EQ(pulse_value(p, -1e-6), 0.0);
    EXPECT_EQ(pulse_value(p, 1.1e-3), 0.0);
}

TEST(Pulse, DerivativeMatchesFiniteDifference) {
    const Pulse f{PulseKind::F1, 2e-4}, df{PulseKind::F1Derivative, 2e-4};
    for (double t = 1e-5; t < 1.95e-4; t += 1.3e-5) {
        const double h = 1e-10;
        const double fd = (pulse_value(f, t + h) - pulse_value(f, t - h)) / (2.0 * h);
        EXPECT_NEAR(pulse_value(df, t), fd, 1e-4 * std::abs(2.0 * std::numbers::pi / 2e-4));
    }
}

TEST(Pulse, SpectrumVanishesLinearlyAtLowFrequency) {
    const Pulse p{PulseKind::F1, 1e-3};
    const double r1 = std::abs(pulse_spectrum(p, 1.0 / 1e-3 * 1e-3));
    const double r2 = std::abs(pulse_spectrum(p, 2.0 / 1e-3 * 1e-3));
    EXPECT_NEAR(r2 / r1, 2.0, 1e-5);
    EXPECT_EQ(std::abs(pulse_spectrum(p, 0.0)), 0.0);
}

TEST(Pulse, SpectrumMatchesNumericTransform) {
    for (auto kind : {PulseKind::F1, PulseKind::F1Derivative}) {
        const Pulse p{kind, 1e-3};
        const double T = p.duration;
        const int m = 20000;  // Simpson panels
        for (double x = 0.1; x <= 20.0; x += 0.1) {
            const double w = x / T;
            std::complex<double> acc = 0.0;
            for (int k = 0; k <= m; ++k) {
                const double t = T * k / m;
                const double wt = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
                acc += wt * pulse_value(p, t) * std::exp(std::complex<double>(0.0, w * t));
            }
            acc *= T / m / 3.0;
            const auto got = pulse_spectrum(p, w);
            EXPECT_LT(std::abs(got - acc), 1e-3 * std::abs(acc)) << "omega T = " << x;
        }
    }
}

TEST(Pulse, SpectrumContinuousAtRemovablePoints) {
    const Pulse p{PulseKind::F1, 1e-3};
    for (double x : {2.0 * std::numbers::pi, 4.0 * std::numbers::pi}) {
        const double w = x / p.duration;
        const auto at = pulse_spectrum(p, w), near = pulse_spectrum(p, w * (1.0 + 1e-4));
        EXPECT_LT(std::abs(at - near), 1e-3 * std::abs(at));
    }
}
