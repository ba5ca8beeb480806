#pragma once

// Discrete-sum synthesis of the propagated flexural packet, free field and in a
// rectangular plate via mirrored image sources.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <sstream>
#include <string_view>
#include <thread>
#include <vector>

#include "slab/error.hpp"
#include "slab/geometry.hpp"
#include "slab/plate_model.hpp"
#include "slab/waveform.hpp"

namespace slab {

enum class SpectralWeight {
    OmegaHalf,          // |alpha| omega^(1/2): the derivative-pulse source spectrum
    Flat,               // unit weight, the bounded-plate variant
    PulseF1Derivative,  // |alpha| omega^(-3/2) F(omega), F the derivative pulse transform
};

constexpr std::string_view to_string(SpectralWeight w) {
    switch (w) {
        case SpectralWeight::OmegaHalf: return "omega_half";
        case SpectralWeight::Flat: return "flat";
        case SpectralWeight::PulseF1Derivative: return "pulse_f1_derivative";
    }
    return "?";
}

inline constexpr double kShortDistanceLimit = 3.0;  // m

struct SynthesisParams {
    double f_max = 10e3;              // Hz
    std::size_t n_terms = 2048;
    SpectralWeight spectral_weight = SpectralWeight::OmegaHalf;
    double pulse_duration = 2e-4;     // s, only used by PulseF1Derivative

    friend bool operator==(const SynthesisParams&, const SynthesisParams&) = default;

    void validate() const {
        if (!(f_max > 0.0)) throw Error(ErrorKind::InvalidArgument, "f_max must be > 0");
        if (n_terms < 16) throw Error(ErrorKind::InvalidArgument, "n_terms must be >= 16");
        if (!(pulse_duration > 0.0)) throw Error(ErrorKind::InvalidArgument, "pulse_duration must be > 0");
    }
    double omega_max() const { return 2.0 * std::numbers::pi * f_max; }
};

namespace detail {

// Complex spectral weight W(omega); the sample is Re{W e^{-k_I d} e^{j(k_R d - omega t + pi/4)}}.
inline std::complex<double> spectral_weight(double omega, const PlateConstants& c, const SynthesisParams& p) {
    switch (p.spectral_weight) {
        case SpectralWeight::OmegaHalf: return c.amp_alpha_mag * std::sqrt(omega);
        case SpectralWeight::Flat: return 1.0;
        case SpectralWeight::PulseF1Derivative:
            if (omega == 0.0) return 0.0;
            return c.amp_alpha_mag * std::pow(omega, -1.5) *
                   pulse_spectrum({PulseKind::F1Derivative, p.pulse_duration}, omega);
    }
    return 0.0;
}

}  // namespace detail

/// u(d, t) ~ (omega_m / n) sum_i W(omega_i) e^{-k_I d} cos(k_R d - omega_i t + pi/4), omega_i = i omega_m / n.
inline Waveform synth_free(double d, const TimeGrid& grid, const PlateConstants& c, double theta,
                           const SynthesisParams& p, Diagnostics* diag = nullptr) {
    p.validate();
    if (grid.count == 0) throw Error(ErrorKind::EmptyInput, "time grid is empty");
    if (!(grid.sample_rate > 0.0)) throw Error(ErrorKind::NonUniformGrid, "sample rate must be > 0");
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "distance must be > 0");
    if (d < kShortDistanceLimit) {
        std::ostringstream msg;
        msg << "d = " << d << " m is below " << kShortDistanceLimit << " m; discrete sum misses the dominant band";
        warn(diag, WarningKind::ShortDistance, msg.str());
    }
    const double wm = p.omega_max();
    if (theta * wm >= kLowLossLimit) {
        std::ostringstream msg;
        msg << "theta*omega_max = " << theta * wm << " exceeds the low-loss limit";
        warn(diag, WarningKind::LossFactorTooLarge, msg.str());
    }

    using namespace std::complex_literals;
    const double dw = wm / static_cast<double>(p.n_terms);
    const double dt = grid.dt();
    std::vector<double> out(grid.count, 0.0);
    // Per term, advance a unit phasor sample by sample; it is re-anchored exactly every
    // `block` samples so rounding drift stays at the 1e-13 level.
    constexpr std::size_t block = 256;
    for (std::size_t i = 0; i < p.n_terms; ++i) {
        const double w = dw * static_cast<double>(i);
        const auto k = wavenumber(w, c, theta);
        const std::complex<double> amp =
            detail::spectral_weight(w, c, p) * std::exp(-k.imag * d) * std::exp(1i * (k.real * d + 0.25 * std::numbers::pi));
        if (amp == 0.0) continue;
        const std::complex<double> step = std::exp(-1i * (w * dt));
        for (std::size_t start = 0; start < grid.count; start += block) {
            std::complex<double> z = amp * std::exp(-1i * (w * grid.at(start)));
            const std::size_t stop = std::min(grid.count, start + block);
            for (std::size_t s = start; s < stop; ++s) {
                out[s] += z.real();
                z *= step;
            }
        }
    }
    for (auto& v : out) v *= dw;
    return {grid.sample_rate, grid.t0, std::move(out)};
}

inline Waveform synth_free(double d, std::span<const double> times, const PlateConstants& c, double theta,
                           const SynthesisParams& p, Diagnostics* diag = nullptr) {
    return synth_free(d, TimeGrid::from_times(times), c, theta, p, diag);
}

struct ImageSource {
    Point2 position;
    int sign = 1;  // R_pq; 0 silences the path
    int p = 0;
    int q = 0;
    double distance_to_sensor = 0.0;
};

struct ImageSourceSet {
    std::vector<ImageSource> entries;
};

/// Mirror images of `source` across the plate edges: x in {x_e + 2 p l_x} (s_x = +1) and
/// {-x_e + 2 p l_x} (s_x = -1), y likewise; each image carries R_pq = s_x s_y.
inline ImageSourceSet image_positions(const RoomGeometry& room, Point2 source, int p_max, int q_max) {
    room.validate();
    if (!room.strictly_contains(source)) throw Error(ErrorKind::SourceOutsideRoom, "source must lie strictly inside");
    if (p_max < 0 || q_max < 0) throw Error(ErrorKind::InvalidArgument, "p_max, q_max must be >= 0");
    ImageSourceSet set;
    set.entries.reserve(static_cast<std::size_t>((2 * p_max + 1) * (2 * q_max + 1) * 4));
    for (int p = -p_max; p <= p_max; ++p)
        for (int sx : {1, -1})
            for (int q = -q_max; q <= q_max; ++q)
                for (int sy : {1, -1}) {
                    const Point2 pos{sx * source.x + 2.0 * p * room.lx, sy * source.y + 2.0 * q * room.ly};
                    set.entries.push_back({pos, sx * sy, p, q, 0.0});
                }
    return set;
}

inline ImageSourceSet image_positions(const RoomGeometry& room, Point2 source, Point2 sensor, int p_max,
                                      int q_max) {
    auto set = image_positions(room, source, p_max, q_max);
    for (auto& e : set.entries) e.distance_to_sensor = distance(e.position, sensor);
    return set;
}

/// Sum over paths of R_pq u(d_pq, t) / sqrt(d_pq). Zero-sign entries are skipped.
/// Sum of R_pq u(d_pq, t) / sqrt(d_pq). Paths are synthesized in parallel batches and added in
/// image order, so the result does not depend on the thread count.
inline Waveform superpose_images(const ImageSourceSet& images, const TimeGrid& grid, const PlateConstants& c,
                                 double theta, const SynthesisParams& p, Diagnostics* diag = nullptr,
                                 unsigned threads = 0) {
    Waveform total{grid.sample_rate, grid.t0, std::vector<double>(grid.count, 0.0)};
    std::vector<const ImageSource*> live;
    for (const auto& e : images.entries) {
        if (e.sign == 0) continue;
        if (!(e.distance_to_sensor > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "image coincides with sensor");
        live.push_back(&e);
    }
    if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    const std::size_t batch = 8 * static_cast<std::size_t>(threads);
    std::vector<Waveform> paths(batch);
    std::vector<Diagnostics> local(batch);
    for (std::size_t b0 = 0; b0 < live.size(); b0 += batch) {
        const std::size_t nb = std::min(batch, live.size() - b0);
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t)
                pool.emplace_back([&, t] {
                    for (std::size_t k = t; k < nb; k += threads)
                        paths[k] = synth_free(live[b0 + k]->distance_to_sensor, grid, c, theta, p, &local[k]);
                });
        }
        for (std::size_t k = 0; k < nb; ++k) {
            const auto& e = *live[b0 + k];
            const double scale = 1.0 / std::sqrt(e.distance_to_sensor);
            for (std::size_t s = 0; s < grid.count; ++s) {
                const double v = paths[k].samples[s] * scale;
                total.samples[s] += e.sign > 0 ? v : -v;
            }
            if (diag)
                for (auto& w : local[k].warnings) diag->warn(w.kind, w.message);
            local[k].warnings.clear();
        }
    }
    return total;
}

inline Waveform synth_bounded(const RoomGeometry& room, Point2 source, Point2 sensor, const PlateConstants& c,
                              double theta, const SynthesisParams& p, int p_max, int q_max, const TimeGrid& grid,
                              Diagnostics* diag = nullptr, unsigned threads = 0) {
    room.validate();
    if (!room.strictly_contains(sensor)) throw Error(ErrorKind::InvalidArgument, "sensor must lie strictly inside");
    if (source == sensor) throw Error(ErrorKind::SourceOnSensor, "sensor coincides with source");
    return superpose_images(image_positions(room, source, sensor, p_max, q_max), grid, c, theta, p, diag, threads);
}

}  // namespace slab
