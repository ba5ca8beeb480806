#pragma once

// The slab command-line tool: subcommands synth, velocity-curve, regions, localize and
// montecarlo. Each writes into <out>/<subcommand>/ a set of CSV files, manifest.json
// (inputs, seed, versions, output digests) and run_metadata.json (wall-clock timestamps,
// the only non-deterministic file).

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "slab/arrival_detection.hpp"
#include "slab/config.hpp"
#include "slab/envelope_analysis.hpp"
#include "slab/error.hpp"
#include "slab/experiment_harness.hpp"
#include "slab/localization.hpp"
#include "slab/region_partition.hpp"
#include "slab/wavefield_synth.hpp"
#include "slab/waveform.hpp"

namespace slab::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// SLAB_LOG: error | warn | info | debug, or 0..3. Default warn.
inline LogLevel log_level_from_env() {
    const char* v = std::getenv("SLAB_LOG");
    if (!v) return LogLevel::Warn;
    const std::string s(v);
    if (s == "error" || s == "0") return LogLevel::Error;
    if (s == "info" || s == "2") return LogLevel::Info;
    if (s == "debug" || s == "3") return LogLevel::Debug;
    return LogLevel::Warn;
}

class Logger {
public:
    Logger(std::ostream& os, LogLevel level) : os_(os), level_(level) {}
    void log(LogLevel l, const std::string& msg) const {
        static constexpr const char* names[] = {"error", "warn", "info", "debug"};
        if (l <= level_) os_ << "slab: " << names[static_cast<int>(l)] << ": " << msg << '\n';
    }
    void warn(const std::string& m) const { log(LogLevel::Warn, m); }
    void info(const std::string& m) const { log(LogLevel::Info, m); }
    void debug(const std::string& m) const { log(LogLevel::Debug, m); }

private:
    std::ostream& os_;
    LogLevel level_;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Collects outputs of one subcommand run and writes the manifest at the end.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
        std::filesystem::create_directories(dir_);
        started_ = std::chrono::system_clock::now();
    }

    const std::filesystem::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& bytes) {
        std::filesystem::create_directories((dir_ / name).parent_path());
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir_ / name).string());
        out << bytes;
        files_[name] = {bytes.size(), fnv1a64(bytes)};
    }

    template <typename F>
    void write_with(const std::string& name, F&& f) {
        std::ostringstream os;
        f(os);
        write(name, os.str());
    }

    /// Records a file written by a library routine (region bundles).
    void adopt(const std::string& name) { register_existing(name); }

    void add_input(const std::string& role, const std::filesystem::path& p) {
        inputs_.push_back({{"role", role}, {"path", p.string()}, {"fnv1a64", hex64(fnv1a64(read_file(p)))}});
    }

    void finish(const RunConfig& cfg, const nlohmann::json& extra = nlohmann::json::object()) {
        using nlohmann::json;
        json outputs = json::array();
        for (const auto& [name, info] : files_)
            outputs.push_back({{"path", name}, {"bytes", info.first}, {"fnv1a64", hex64(info.second)}});
        json manifest{
            {"command", command_},
            {"config", config_to_json(cfg)},
            {"seed", cfg.monte_carlo.seed},
            {"inputs", inputs_},
            {"outputs", outputs},
            {"parameters", extra},
            {"versions",
             {{"slab", kVersion},
              {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
              {"cli11", CLI11_VERSION},
              {"compiler", compiler_id()},
              {"rng", std::string(kRngAlgorithm)}}},
        };
        write_raw("manifest.json", manifest.dump(2) + "\n");

        const auto ended = std::chrono::system_clock::now();
        json meta{{"command", command_},
                  {"started_utc", iso_utc(started_)},
                  {"finished_utc", iso_utc(ended)},
                  {"elapsed_s", std::chrono::duration<double>(ended - started_).count()}};
        write_raw("run_metadata.json", meta.dump(2) + "\n");
    }

private:
    static std::string compiler_id() {
#if defined(__clang__)
        return "clang " __clang_version__;
#elif defined(__GNUC__)
        return "gcc " __VERSION__;
#else
        return "unknown";
#endif
    }

    static std::string iso_utc(std::chrono::system_clock::time_point tp) {
        const std::time_t t = std::chrono::system_clock::to_time_t(tp);
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::ostringstream os;
        os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        return os.str();
    }

    void register_existing(const std::string& name) {
        const auto bytes = read_file(dir_ / name);
        files_[name] = {bytes.size(), fnv1a64(bytes)};
    }

    void write_raw(const std::string& name, const std::string& bytes) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + (dir_ / name).string());
        out << bytes;
    }

    std::filesystem::path dir_;
    std::string command_;
    std::chrono::system_clock::time_point started_;
    std::map<std::string, std::pair<std::size_t, std::uint64_t>> files_;
    nlohmann::json inputs_ = nlohmann::json::array();
};

/// "5" for 5.0, "12.5" for 12.5; used in file names.
inline std::string number_tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::string algo = "all";

    std::vector<double> distances;
    bool bounded = false;
    std::optional<double> theta;

    std::string toas_path;
    std::string regions_path;

    std::optional<std::size_t> runs;
    unsigned threads = 0;
};

inline RunConfig resolve_config(const Options& o) {
    RunConfig cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);
    if (o.seed) cfg.monte_carlo.seed = *o.seed;
    if (o.out_dir) cfg.output_dir = *o.out_dir;
    if (o.theta) {
        cfg.material.damping_theta = *o.theta;
        try {
            cfg.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, std::string("--theta: ") + e.what());
        }
    }
    if (o.runs) {
        if (*o.runs < 1) throw Error(ErrorKind::Config, "--runs must be >= 1");
        cfg.monte_carlo.runs = *o.runs;
    }
    return cfg;
}

inline std::vector<Algorithm> parse_algorithms(const std::string& s) {
    if (s == "all") return {Algorithm::SoTdoaRegion, Algorithm::SoTdoaGrid, Algorithm::Hyperbolic};
    for (auto a : {Algorithm::SoTdoaRegion, Algorithm::SoTdoaGrid, Algorithm::Hyperbolic})
        if (s == to_string(a)) return {a};
    throw Error(ErrorKind::Config, "--algo must be so-tdoa, so-tdoa-grid, hyperbolic or all");
}

inline void report_diagnostics(const Diagnostics& d, const Logger& log) {
    for (const auto& w : d.warnings) log.warn(w.message);
}

inline void run_synth(const Options& o, const Logger& log) {
    const auto cfg = resolve_config(o);
    OutputSet out(std::filesystem::path(cfg.output_dir) / "synth", "synth");
    if (!o.config_path.empty()) out.add_input("config", o.config_path);
    const auto consts = cfg.constants();
    const double theta = cfg.material.damping_theta;
    Diagnostics diag;
    nlohmann::json params = nlohmann::json::object();

    if (o.bounded) {
        const auto& b = cfg.bounded;
        auto sp = cfg.synthesis;
        sp.spectral_weight = b.spectral_weight;
        const auto grid = TimeGrid::from_duration(cfg.sampling.t0, cfg.sampling.sample_rate, b.duration);
        log.info("bounded synthesis with " + std::to_string((2 * b.p_max + 1) * (2 * b.q_max + 1) * 4) + " images");
        const auto w = synth_bounded(b.room, b.source, b.sensor, consts, theta, sp, b.p_max, b.q_max, grid, &diag);
        const auto spec = stft(w, cfg.stft);
        out.write_with("bounded.csv", [&](std::ostream& os) { write_waveform_csv(os, w); });
        out.write_with("bounded.bin", [&](std::ostream& os) { write_waveform_binary(os, w); });
        out.write_with("bounded_stft.csv", [&](std::ostream& os) { write_spectrogram_csv(os, spec); });
        out.write_with("bounded_peak_freq.csv", [&](std::ostream& os) {
            os << "time_s,peak_freq_hz,frame_energy\n" << std::setprecision(17);
            for (std::size_t f = 0; f < spec.frames(); ++f)
                os << spec.frame_times[f] << ',' << spec.bin_freqs[spec.peak_bin(f)] << ',' << spec.frame_energy(f)
                   << '\n';
        });
        params = {{"mode", "bounded"}, {"theta", theta}, {"energy", w.energy()}};
    } else {
        const auto distances = o.distances.empty() ? cfg.synth_distances : o.distances;
        if (distances.empty()) throw Error(ErrorKind::Config, "no distances requested");
        const auto grid = cfg.sampling.grid();
        std::ostringstream summary;
        summary << "distance_m,peak_abs,peak_time_s,toa_s,toa_method\n" << std::setprecision(17);
        for (double d : distances) {
            const auto w = synth_free(d, grid, consts, theta, cfg.synthesis, &diag);
            const std::string tag = "d" + number_tag(d);
            out.write_with("wave_" + tag + ".csv", [&](std::ostream& os) { write_waveform_csv(os, w); });
            out.write_with("wave_" + tag + ".bin", [&](std::ostream& os) { write_waveform_binary(os, w); });
            out.write_with("stft_" + tag + ".csv", [&](std::ostream& os) { write_spectrogram_csv(os, stft(w, cfg.stft)); });
            const auto peak = detect_peak(w);
            summary << d << ',' << w.peak_abs() << ',' << peak.time << ',';
            try {
                const auto toa = detect_toa(w, cfg.detection);
                summary << toa.time << ',' << to_string(toa.method) << '\n';
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoOnset) throw;
                log.warn("no onset at d = " + number_tag(d) + " m");
                summary << ",none\n";
            }
        }
        out.write("summary.csv", summary.str());
        params = {{"mode", "free"}, {"distances", distances}, {"theta", theta}};
    }
    report_diagnostics(diag, log);
    out.finish(cfg, params);
}

inline void run_velocity_curve(const Options& o, const Logger& log) {
    const auto cfg = resolve_config(o);
    OutputSet out(std::filesystem::path(cfg.output_dir) / "velocity_curve", "velocity-curve");
    if (!o.config_path.empty()) out.add_input("config", o.config_path);
    const auto& vc = cfg.velocity_curve;
    const auto pts = velocity_curve(vc.distances(), cfg.constants(), cfg.material.damping_theta, vc.level_fraction,
                                    vc.reference_distance);
    out.write_with("velocity_curve.csv", [&](std::ostream& os) {
        os << "distance_m,cp_analytic_mps,cp_threshold_numeric_mps\n" << std::setprecision(17);
        for (const auto& p : pts) os << p.distance << ',' << p.analytic << ',' << p.threshold_numeric << '\n';
    });
    log.info("wrote " + std::to_string(pts.size()) + " velocity points");
    out.finish(cfg);
}

inline void run_regions(const Options& o, const Logger& log) {
    const auto cfg = resolve_config(o);
    OutputSet out(std::filesystem::path(cfg.output_dir) / "regions", "regions");
    if (!o.config_path.empty()) out.add_input("config", o.config_path);
    const auto map = enumerate_regions(cfg.room, cfg.sensors, cfg.region_grid, o.threads);
    write_region_bundle(out.dir(), map);
    out.adopt("regions.csv");
    out.adopt("layout.csv");
    out.write_with("cells.csv", [&](std::ostream& os) {
        // Region id per grid cell, one row per y index; plot-ready label image.
        for (std::size_t iy = 0; iy < map.grid.ny; ++iy) {
            for (std::size_t ix = 0; ix < map.grid.nx; ++ix) os << (ix ? "," : "") << map.region_at_cell(ix, iy);
            os << '\n';
        }
    });
    log.info("Q = " + std::to_string(map.size()) + " regions (bound " +
             std::to_string(region_upper_bound(cfg.sensors.size())) + ")");
    out.finish(cfg, {{"region_count", map.size()}, {"upper_bound", region_upper_bound(cfg.sensors.size())}});
}

inline void run_localize(const Options& o, const Logger& log) {
    const auto cfg = resolve_config(o);
    if (o.toas_path.empty()) throw Error(ErrorKind::Config, "localize needs --toas PATH");
    const auto algos = parse_algorithms(o.algo);
    std::ifstream tin(o.toas_path);
    if (!tin) throw Error(ErrorKind::Config, "cannot open TOA table " + o.toas_path);
    std::vector<double> toas;
    try {
        toas = read_toa_table(tin);
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, o.toas_path + ": " + e.what());
    }
    if (toas.size() != cfg.sensors.size())
        throw Error(ErrorKind::Config, o.toas_path + ": TOA table has " + std::to_string(toas.size()) +
                                           " sensors, config has " + std::to_string(cfg.sensors.size()));

    OutputSet out(std::filesystem::path(cfg.output_dir) / "localize", "localize");
    if (!o.config_path.empty()) out.add_input("config", o.config_path);
    out.add_input("toas", o.toas_path);

    std::optional<RegionMap> map;
    auto region_map = [&]() -> const RegionMap& {
        if (map) return *map;
        if (!o.regions_path.empty()) {
            map = read_region_bundle(o.regions_path);
            if (!(map->sensors == cfg.sensors))
                throw Error(ErrorKind::Config, o.regions_path + ": region bundle sensors differ from config");
            out.add_input("regions", std::filesystem::path(o.regions_path) / "regions.csv");
        } else {
            map = enumerate_regions(cfg.room, cfg.sensors, cfg.region_grid, o.threads);
        }
        return *map;
    };

    const auto tau = tdoa_from_toas(toas);
    const SearchGrid grid(cfg.sensors, cell_centers(cfg.room, cfg.monte_carlo.grid.nx, cfg.monte_carlo.grid.ny));
    std::ostringstream rows;
    write_results_header(rows);
    for (auto a : algos) {
        LocalizationResult r;
        switch (a) {
            case Algorithm::SoTdoaRegion: r = localize_so_tdoa(tau, region_map()); break;
            case Algorithm::SoTdoaGrid: r = localize_so_tdoa_grid(tau, grid); break;
            case Algorithm::Hyperbolic: r = localize_hyperbolic(tau, cfg.monte_carlo.c_hat, grid); break;
        }
        log.info(std::string(to_string(a)) + ": (" + number_tag(r.estimate.x) + ", " + number_tag(r.estimate.y) + ")");
        write_result_row(rows, r);
    }
    out.write("results.csv", rows.str());
    out.finish(cfg, {{"algo", o.algo}});
}

inline void run_montecarlo(const Options& o, const Logger& log) {
    const auto cfg = resolve_config(o);
    const auto algos = parse_algorithms(o.algo);
    OutputSet out(std::filesystem::path(cfg.output_dir) / "montecarlo", "montecarlo");
    if (!o.config_path.empty()) out.add_input("config", o.config_path);

    auto mc = cfg.monte_carlo_config();
    mc.algorithms = algos;
    mc.threads = o.threads;
    std::optional<RegionMap> map;
    if (std::find(algos.begin(), algos.end(), Algorithm::SoTdoaRegion) != algos.end())
        map = enumerate_regions(mc.room, mc.sensors, mc.region_grid, o.threads);
    log.info("running " + std::to_string(mc.runs) + " runs x " + std::to_string(mc.sigma_t_list.size()) +
             " noise levels");
    const auto rep = run_monte_carlo(mc, map ? &*map : nullptr);
    out.write_with("rmse.csv", [&](std::ostream& os) { write_report_csv(os, rep); });
    if (mc.keep_runs) out.write_with("runs.csv", [&](std::ostream& os) { write_runs_csv(os, rep); });
    for (auto a : algos) {
        out.write_with("curve_" + std::string(to_string(a)) + ".csv", [&](std::ostream& os) {
            os << "sigma_t_ms,rmse_m\n" << std::setprecision(17);
            for (double s : mc.sigma_t_list) os << s * 1e3 << ',' << *rep.rmse(a, s) << '\n';
        });
    }

    // Hyperbolic sensitivity to the assumed speed.
    if (std::find(algos.begin(), algos.end(), Algorithm::Hyperbolic) != algos.end() &&
        !cfg.monte_carlo.c_hat_sweep.empty()) {
        std::ostringstream sweep;
        sweep << "c_hat_mps,sigma_t_s,rmse_m\n" << std::setprecision(17);
        for (double ch : cfg.monte_carlo.c_hat_sweep) {
            auto m2 = mc;
            m2.algorithms = {Algorithm::Hyperbolic};
            m2.c_hat = ch;
            const auto r2 = run_monte_carlo(m2, nullptr);
            for (double s : mc.sigma_t_list) sweep << ch << ',' << s << ',' << *r2.rmse(Algorithm::Hyperbolic, s) << '\n';
        }
        out.write("c_hat_sweep.csv", sweep.str());
    }
    out.finish(cfg, {{"algo", o.algo}, {"threads_requested", o.threads}});
}

/// Parses argv and dispatches. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    Options o;
    CLI::App app{"Flexural-wave synthesis and sign-of-TDOA localization on a damped plate", "slab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Run configuration (JSON)");
        sub->add_option("--seed", o.seed, "RNG seed, overrides monte_carlo.seed");
        sub->add_option("--out", o.out_dir, "Output directory, overrides output_dir");
        sub->add_option("--threads", o.threads, "Worker threads (0 = auto)");
    };
    auto* synth = app.add_subcommand("synth", "Synthesize received waveforms");
    common(synth);
    synth->add_option("--distance", o.distances, "Source-sensor distance in m (repeatable)");
    auto* bounded = synth->add_flag("--room-source-sensor,--bounded", o.bounded,
                                    "Bounded plate with image sources, geometry from the bounded section");
    bounded->excludes(synth->get_option("--distance"));
    synth->add_option("--theta", o.theta, "Override the damping coefficient (s)");

    auto* vcurve = app.add_subcommand("velocity-curve", "Perceived velocity versus distance");
    common(vcurve);
    vcurve->add_option("--theta", o.theta, "Override the damping coefficient (s)");

    auto* regions = app.add_subcommand("regions", "Enumerate bisector regions and write the region bundle");
    common(regions);

    auto* localize = app.add_subcommand("localize", "Localize a source from a TOA table");
    common(localize);
    localize->add_option("--toas", o.toas_path, "TOA table (sensor_id,toa_s,method)")->required();
    localize->add_option("--regions", o.regions_path, "Region bundle directory from 'regions'");
    localize->add_option("--algo", o.algo, "so-tdoa, so-tdoa-grid, hyperbolic or all");

    auto* mc = app.add_subcommand("montecarlo", "RMSE versus TOA noise");
    common(mc);
    mc->add_option("--algo", o.algo, "so-tdoa, so-tdoa-grid, hyperbolic or all");
    mc->add_option("--runs", o.runs, "Runs per noise level, overrides monte_carlo.runs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "slab: " << e.what() << '\n';
        return kConfigError;
    }

    const Logger log(err, log_level_from_env());
    try {
        if (synth->parsed()) run_synth(o, log);
        else if (vcurve->parsed()) run_velocity_curve(o, log);
        else if (regions->parsed()) run_regions(o, log);
        else if (localize->parsed()) run_localize(o, log);
        else if (mc->parsed()) run_montecarlo(o, log);
    } catch (const Error& e) {
        log.log(LogLevel::Error, e.what());
        return e.kind() == ErrorKind::Config ? kConfigError : kRuntimeError;
    } catch (const std::exception& e) {
        log.log(LogLevel::Error, e.what());
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace slab::cli
