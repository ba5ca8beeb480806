#pragma once

// Numeric probes of the stationary-phase envelope: where its maximum over distance
// sits at a given time, and when a fixed level is first reached at a given distance.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "slab/error.hpp"
#include "slab/plate_model.hpp"

namespace slab {

/// Brent search for argmax_d A(d, t) on [d_lo, d_hi].
inline double envelope_argmax_distance(double t, const PlateConstants& c, double theta, double d_lo, double d_hi) {
    if (!(d_lo > 0.0) || !(d_hi > d_lo)) throw Error(ErrorKind::InvalidArgument, "need 0 < d_lo < d_hi");
    // Work on -log A to keep the objective well scaled.
    auto neg_log = [&](double d) { return -std::log(envelope(d, t, c, theta)); };
    std::uintmax_t iters = 500;
    const auto r = boost::math::tools::brent_find_minima(neg_log, d_lo, d_hi, 52, iters);
    return r.first;
}

/// Earliest t with A(d, t) = level, on the rising side before the fixed-distance peak.
inline double envelope_level_crossing(double d, double level, const PlateConstants& c, double theta) {
    if (!(level > 0.0)) throw Error(ErrorKind::InvalidArgument, "level must be > 0");
    const double t_peak = envelope_peak_time(d, c, theta);
    if (envelope(d, t_peak, c, theta) < level) throw Error(ErrorKind::NoOnset, "envelope never reaches the level");
    auto f = [&](double t) { return std::log(envelope(d, t, c, theta)) - std::log(level); };
    double lo = t_peak;
    while (f(lo) > 0.0) lo *= 0.5;
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, t_peak, boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

/// Maximum over t of A(d, t).
inline double envelope_peak_value(double d, const PlateConstants& c, double theta) {
    return envelope(d, envelope_peak_time(d, c, theta), c, theta);
}

struct VelocityCurvePoint {
    double distance;            // m
    double analytic;            // (16 a^2 / (theta d))^(1/3), m/s
    double threshold_numeric;   // d / t_level(d), m/s
};

/// Perceived velocity two ways: the closed-form maximum locus, and the first time the
/// envelope reaches `level_fraction` of the peak envelope observed at `reference_distance`.
inline std::vector<VelocityCurvePoint> velocity_curve(const std::vector<double>& distances, const PlateConstants& c,
                                                      double theta, double level_fraction = 0.1,
                                                      double reference_distance = 5.0) {
    const double level = level_fraction * envelope_peak_value(reference_distance, c, theta);
    std::vector<VelocityCurvePoint> out;
    out.reserve(distances.size());
    for (double d : distances)
        out.push_back({d, perceived_velocity(d, c, theta), d / envelope_level_crossing(d, level, c, theta)});
    return out;
}

}  // namespace slab
