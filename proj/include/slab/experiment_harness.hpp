#pragma once

// Monte Carlo comparison of the localizers under distance-dependent propagation speed
// and Gaussian TOA errors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <string_view>
#include <thread>
#include <vector>

#include "slab/codeword.hpp"
#include "slab/error.hpp"
#include "slab/geometry.hpp"
#include "slab/localization.hpp"
#include "slab/region_partition.hpp"

namespace slab {

enum class ProfileKind { Constant, PowerLaw, ClampedDecay };

constexpr std::string_view to_string(ProfileKind k) {
    switch (k) {
        case ProfileKind::Constant: return "constant";
        case ProfileKind::PowerLaw: return "power_law";
        case ProfileKind::ClampedDecay: return "clamped_decay";
    }
    return "?";
}

/// Perceived propagation speed as a function of source-sensor distance.
struct VelocityProfile {
    ProfileKind kind = ProfileKind::PowerLaw;
    double c0 = 1000.0;      // Constant, m/s
    double a = 183.0;        // PowerLaw, m^2/s
    double theta = 1e-5;     // PowerLaw, s
    double c_near = 2000.0;  // ClampedDecay, m/s
    double c_far = 500.0;    // ClampedDecay, m/s
    double d_knee = 3.0;     // ClampedDecay, m

    friend bool operator==(const VelocityProfile&, const VelocityProfile&) = default;

    static VelocityProfile constant(double c0) { return {.kind = ProfileKind::Constant, .c0 = c0}; }
    static VelocityProfile power_law(double a, double theta) {
        return {.kind = ProfileKind::PowerLaw, .a = a, .theta = theta};
    }
    static VelocityProfile clamped_decay(double c_near, double c_far, double d_knee) {
        return {.kind = ProfileKind::ClampedDecay, .c_near = c_near, .c_far = c_far, .d_knee = d_knee};
    }

    void validate() const {
        switch (kind) {
            case ProfileKind::Constant:
                if (!(c0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "c0 must be > 0");
                break;
            case ProfileKind::PowerLaw:
                if (!(a > 0.0) || !(theta > 0.0)) throw Error(ErrorKind::InvalidArgument, "a and theta must be > 0");
                break;
            case ProfileKind::ClampedDecay:
                if (!(c_far > 0.0) || !(c_near > c_far) || !(d_knee > 0.0))
                    throw Error(ErrorKind::InvalidArgument, "clamped decay needs c_near > c_far > 0, d_knee > 0");
                break;
        }
    }
};

/// Constant: c0. PowerLaw: (16 a^2 / (theta d))^(1/3). ClampedDecay: c_far + (c_near - c_far) / (1 + (d/d_knee)^4),
/// a plateau at c_near that rolls off through d_knee towards c_far.
inline double profile_speed(const VelocityProfile& p, double d) {
    if (!(d > 0.0)) throw Error(ErrorKind::NonPositiveDistance, "distance must be > 0");
    switch (p.kind) {
        case ProfileKind::Constant: return p.c0;
        case ProfileKind::PowerLaw: return std::cbrt(16.0 * p.a * p.a / (p.theta * d));
        case ProfileKind::ClampedDecay: {
            const double r = d / p.d_knee;
            const double r2 = r * r;
            return p.c_far + (p.c_near - p.c_far) / (1.0 + r2 * r2);
        }
    }
    return 0.0;
}

/// t_i = d_i / c(d_i).
inline std::vector<double> simulate_toas(Point2 source, const SensorArray& sensors, const VelocityProfile& p) {
    p.validate();
    std::vector<double> toas(sensors.size());
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const double d = distance(source, sensors[i]);
        if (d == 0.0) throw Error(ErrorKind::SourceOnSensor, "source coincides with a sensor");
        toas[i] = d / profile_speed(p, d);
    }
    return toas;
}

using Rng = std::mt19937_64;

inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 per run, seeded by std::seed_seq{seed_lo32, seed_hi32, sigma_index, run_index}; "
    "std::normal_distribution";

/// Independent stream for run `run` at noise level `sigma_index`, so runs may execute in any order.
inline Rng make_run_rng(std::uint64_t seed, std::size_t sigma_index, std::size_t run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(sigma_index), static_cast<std::uint32_t>(run)};
    return Rng(seq);
}

inline std::vector<double> add_toa_noise(std::vector<double> toas, double sigma_t, Rng& rng) {
    if (!(sigma_t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_t must be >= 0");
    if (sigma_t == 0.0) return toas;
    std::normal_distribution<double> noise(0.0, sigma_t);
    for (auto& t : toas) t += noise(rng);
    return toas;
}

struct MonteCarloConfig {
    RoomGeometry room{10.0, 10.0};
    SensorArray sensors;
    Point2 source{1.0, 3.0};
    VelocityProfile profile;
    std::vector<double> sigma_t_list{0.0, 0.25e-3, 0.5e-3, 0.75e-3, 1e-3};
    std::size_t runs = 500;
    GridResolution grid{25, 25};          // search grid for the grid and hyperbolic estimators
    GridResolution region_grid{200, 200};  // sampling used to build the region codebook
    double c_hat = 1000.0;
    std::uint64_t rng_seed = 1;
    std::vector<Algorithm> algorithms{Algorithm::SoTdoaRegion, Algorithm::SoTdoaGrid, Algorithm::Hyperbolic};
    bool keep_runs = false;
    unsigned threads = 0;

    void validate() const {
        room.validate();
        if (sensors.size() < 2) throw Error(ErrorKind::InvalidArgument, "Monte Carlo needs sensors");
        if (runs < 1) throw Error(ErrorKind::InvalidArgument, "runs must be >= 1");
        for (double s : sigma_t_list)
            if (!(s >= 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_t must be >= 0");
        if (!room.contains(source)) throw Error(ErrorKind::SourceOutsideRoom, "source outside room");
        if (!(c_hat > 0.0)) throw Error(ErrorKind::InvalidArgument, "c_hat must be > 0");
        if (grid.nx == 0 || grid.ny == 0) throw Error(ErrorKind::DegenerateGrid, "search grid is empty");
        profile.validate();
    }
};

struct RmseEntry {
    Algorithm algorithm;
    double sigma_t;
    double rmse;
    std::size_t runs;
};

struct RunEstimate {
    Algorithm algorithm;
    double sigma_t;
    std::size_t run;
    Point2 estimate;
};

struct MonteCarloReport {
    std::uint64_t seed = 0;
    std::vector<RmseEntry> entries;
    std::vector<RunEstimate> run_estimates;  // filled when keep_runs is set

    std::optional<double> rmse(Algorithm a, double sigma_t) const {
        for (const auto& e : entries)
            if (e.algorithm == a && e.sigma_t == sigma_t) return e.rmse;
        return std::nullopt;
    }
};

/// RMSE(sigma) = sqrt(mean over runs of |p_s - p_hat|^2) for every (algorithm, sigma_t).
/// Uses `map` as the region codebook when given, otherwise builds one from the config.
inline MonteCarloReport run_monte_carlo(const MonteCarloConfig& cfg, const RegionMap* map = nullptr) {
    cfg.validate();
    std::optional<RegionMap> own;
    if (!map) {
        own = enumerate_regions(cfg.room, cfg.sensors, cfg.region_grid, cfg.threads);
        map = &*own;
    }
    const SearchGrid grid(cfg.sensors, cell_centers(cfg.room, cfg.grid.nx, cfg.grid.ny));
    const auto clean = simulate_toas(cfg.source, cfg.sensors, cfg.profile);
    const std::size_t n_alg = cfg.algorithms.size();

    MonteCarloReport report;
    report.seed = cfg.rng_seed;
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

    for (std::size_t si = 0; si < cfg.sigma_t_list.size(); ++si) {
        const double sigma = cfg.sigma_t_list[si];
        std::vector<Point2> est(cfg.runs * n_alg);
        auto work = [&](std::size_t r0, std::size_t r1) {
            for (std::size_t r = r0; r < r1; ++r) {
                auto rng = make_run_rng(cfg.rng_seed, si, r);
                const auto tau = tdoa_from_toas(add_toa_noise(clean, sigma, rng));
                for (std::size_t a = 0; a < n_alg; ++a) {
                    switch (cfg.algorithms[a]) {
                        case Algorithm::SoTdoaRegion: est[r * n_alg + a] = localize_so_tdoa(tau, *map).estimate; break;
                        case Algorithm::SoTdoaGrid: est[r * n_alg + a] = localize_so_tdoa_grid(tau, grid).estimate; break;
                        case Algorithm::Hyperbolic:
                            est[r * n_alg + a] = localize_hyperbolic(tau, cfg.c_hat, grid).estimate;
                            break;
                    }
                }
            }
        };
        {
            std::vector<std::jthread> pool;
            const std::size_t per = (cfg.runs + threads - 1) / threads;
            for (unsigned t = 0; t < threads; ++t) {
                const std::size_t r0 = t * per, r1 = std::min(cfg.runs, r0 + per);
                if (r0 >= r1) break;
                pool.emplace_back(work, r0, r1);
            }
        }
        // Accumulate in run order so the sums do not depend on scheduling.
        for (std::size_t a = 0; a < n_alg; ++a) {
            double acc = 0.0;
            for (std::size_t r = 0; r < cfg.runs; ++r) {
                const auto e = est[r * n_alg + a] - cfg.source;
                acc += e.x * e.x + e.y * e.y;
                if (cfg.keep_runs) report.run_estimates.push_back({cfg.algorithms[a], sigma, r, est[r * n_alg + a]});
            }
            report.entries.push_back({cfg.algorithms[a], sigma, std::sqrt(acc / static_cast<double>(cfg.runs)), cfg.runs});
        }
    }
    return report;
}

inline void write_report_csv(std::ostream& os, const MonteCarloReport& rep) {
    os << "# rng: " << kRngAlgorithm << '\n';
    os << "algorithm,sigma_t_s,rmse_m,runs,seed\n" << std::setprecision(17);
    for (const auto& e : rep.entries)
        os << to_string(e.algorithm) << ',' << e.sigma_t << ',' << e.rmse << ',' << e.runs << ',' << rep.seed << '\n';
}

inline void write_runs_csv(std::ostream& os, const MonteCarloReport& rep) {
    os << "algorithm,sigma_t_s,run,est_x,est_y\n" << std::setprecision(17);
    for (const auto& r : rep.run_estimates)
        os << to_string(r.algorithm) << ',' << r.sigma_t << ',' << r.run << ',' << r.estimate.x << ',' << r.estimate.y
           << '\n';
}

}  // namespace slab
