#pragma once

// RunConfig: one JSON document describing plate, room, sensors and every pipeline stage.
// Every key is optional and defaults to the reference concrete-slab setup; unknown keys
// and wrong types are rejected with the offending key path.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "slab/arrival_detection.hpp"
#include "slab/error.hpp"
#include "slab/experiment_harness.hpp"
#include "slab/geometry.hpp"
#include "slab/localization.hpp"
#include "slab/plate_model.hpp"
#include "slab/region_partition.hpp"
#include "slab/wavefield_synth.hpp"

namespace slab {

struct SamplingConfig {
    double sample_rate = 20000.0;  // Hz
    double duration = 0.1;         // s
    double t0 = 0.0;               // s
    friend bool operator==(const SamplingConfig&, const SamplingConfig&) = default;
    TimeGrid grid() const { return TimeGrid::from_duration(t0, sample_rate, duration); }
};

struct BoundedConfig {
    RoomGeometry room{3.6, 5.4};
    Point2 source{0.9, 1.35};
    Point2 sensor{0.2, 5.2};
    int p_max = 4;
    int q_max = 4;
    SpectralWeight spectral_weight = SpectralWeight::Flat;
    double duration = 0.2;
    friend bool operator==(const BoundedConfig&, const BoundedConfig&) = default;
};

struct VelocityCurveConfig {
    double d_min = 5.0;
    double d_max = 20.0;
    double step = 0.5;
    double level_fraction = 0.1;
    double reference_distance = 5.0;
    friend bool operator==(const VelocityCurveConfig&, const VelocityCurveConfig&) = default;

    std::vector<double> distances() const {
        std::vector<double> d;
        const auto n = static_cast<std::size_t>(std::floor((d_max - d_min) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) d.push_back(d_min + static_cast<double>(i) * step);
        return d;
    }
};

struct MonteCarloSection {
    Point2 source{1.0, 3.0};
    std::vector<double> sigma_t{0.0, 0.25e-3, 0.5e-3, 0.75e-3, 1e-3};
    std::size_t runs = 500;
    GridResolution grid{25, 25};
    double c_hat = 1000.0;
    std::vector<double> c_hat_sweep{500.0, 1000.0, 2000.0};  // extra hyperbolic runs
    std::uint64_t seed = 1;
    bool keep_runs = false;
    friend bool operator==(const MonteCarloSection&, const MonteCarloSection&) = default;
};

inline std::vector<Point2> default_sensor_layout() {
    std::vector<Point2> s;
    for (double y : {1.0, 5.0, 9.0})
        for (double x : {1.0, 5.0, 9.0}) s.push_back({x, y});
    return s;
}

struct RunConfig {
    PlateMaterial material;
    std::optional<double> dispersion_a;  // overrides the derived a when set
    RoomGeometry room{10.0, 10.0};
    SensorArray sensors{default_sensor_layout()};
    SynthesisParams synthesis;
    SamplingConfig sampling;
    std::vector<double> synth_distances{5.0, 10.0, 15.0, 20.0};
    BoundedConfig bounded;
    StftParams stft;
    ThresholdRule detection;
    VelocityProfile profile;
    VelocityCurveConfig velocity_curve;
    GridResolution region_grid{200, 200};
    MonteCarloSection monte_carlo;
    std::string output_dir = "out";

    friend bool operator==(const RunConfig& a, const RunConfig& b) {
        return a.material == b.material && a.dispersion_a == b.dispersion_a && a.room == b.room &&
               a.sensors == b.sensors && a.synthesis == b.synthesis && a.sampling == b.sampling &&
               a.synth_distances == b.synth_distances && a.bounded == b.bounded && a.stft == b.stft &&
               a.detection.mode == b.detection.mode && a.detection.value == b.detection.value &&
               a.detection.interpolate == b.detection.interpolate && a.profile == b.profile &&
               a.velocity_curve == b.velocity_curve && a.region_grid == b.region_grid &&
               a.monte_carlo == b.monte_carlo && a.output_dir == b.output_dir;
    }

    PlateConstants constants() const {
        const auto derived = derive_constants(material);
        if (!dispersion_a) return derived;
        return constants_from_dispersion(*dispersion_a, derived.bending_stiffness, material.damping_theta);
    }

    MonteCarloConfig monte_carlo_config() const {
        MonteCarloConfig mc;
        mc.room = room;
        mc.sensors = sensors;
        mc.source = monte_carlo.source;
        mc.profile = profile;
        mc.sigma_t_list = monte_carlo.sigma_t;
        mc.runs = monte_carlo.runs;
        mc.grid = monte_carlo.grid;
        mc.region_grid = region_grid;
        mc.c_hat = monte_carlo.c_hat;
        mc.rng_seed = monte_carlo.seed;
        mc.keep_runs = monte_carlo.keep_runs;
        return mc;
    }

    void validate() const {
        material.validate();
        room.validate();
        sensors.require_inside(room);
        if (sensors.size() < 3) throw Error(ErrorKind::Config, "sensors: need at least 3 sensors");
        synthesis.validate();
        stft.validate();
        profile.validate();
        bounded.room.validate();
        if (!(sampling.sample_rate > 0.0) || !(sampling.duration > 0.0))
            throw Error(ErrorKind::Config, "sampling: sample_rate and duration must be > 0");
        if (!(detection.value > 0.0)) throw Error(ErrorKind::Config, "detection.value must be > 0");
        if (region_grid.nx < 10 || region_grid.ny < 10) throw Error(ErrorKind::Config, "region_grid must be >= 10x10");
        for (double ch : monte_carlo.c_hat_sweep)
            if (!(ch > 0.0)) throw Error(ErrorKind::Config, "monte_carlo.c_hat_sweep entries must be > 0");
        if (monte_carlo.runs < 1) throw Error(ErrorKind::Config, "monte_carlo.runs must be >= 1");
        if (!room.contains(monte_carlo.source)) throw Error(ErrorKind::Config, "monte_carlo.source: outside the room");
        for (const auto& g : sensors.positions())
            if (g == monte_carlo.source) throw Error(ErrorKind::Config, "monte_carlo.source: coincides with a sensor");
        for (double s : monte_carlo.sigma_t)
            if (!(s >= 0.0)) throw Error(ErrorKind::Config, "monte_carlo.sigma_t entries must be >= 0");
        if (!(monte_carlo.c_hat > 0.0)) throw Error(ErrorKind::Config, "monte_carlo.c_hat must be > 0");
        if (monte_carlo.grid.nx == 0 || monte_carlo.grid.ny == 0)
            throw Error(ErrorKind::Config, "monte_carlo.grid must be non-empty");
        if (!bounded.room.strictly_contains(bounded.source) || !bounded.room.contains(bounded.sensor))
            throw Error(ErrorKind::Config, "bounded: source and sensor must lie inside bounded.room");
        if (!(velocity_curve.step > 0.0) || !(velocity_curve.d_max >= velocity_curve.d_min) ||
            !(velocity_curve.d_min > 0.0))
            throw Error(ErrorKind::Config, "velocity_curve: need 0 < d_min <= d_max and step > 0");
    }
};

namespace config_detail {

using nlohmann::json;

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        read(j_.at(key), child(key), out);
    }

    void mark(const char* key) { seen_.insert(key); }

    template <typename F>
    void object(const char* key, F&& f) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        Reader r(j_.at(key), child(key));
        f(r);
        r.finish();
    }

    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw Error(ErrorKind::Config, child(k) + ": unknown key");
    }

    std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorKind::Config, path_ + ": " + msg); }

    static void read(const json& v, const std::string& p, double& out) {
        if (!v.is_number()) throw Error(ErrorKind::Config, p + ": expected a number");
        out = v.get<double>();
    }
    static void read(const json& v, const std::string& p, std::size_t& out) {
        if (!v.is_number_unsigned()) throw Error(ErrorKind::Config, p + ": expected a non-negative integer");
        out = v.get<std::size_t>();
    }
    static void read(const json& v, const std::string& p, int& out) {
        if (!v.is_number_integer()) throw Error(ErrorKind::Config, p + ": expected an integer");
        out = v.get<int>();
    }
    static void read(const json& v, const std::string& p, bool& out) {
        if (!v.is_boolean()) throw Error(ErrorKind::Config, p + ": expected true or false");
        out = v.get<bool>();
    }
    static void read(const json& v, const std::string& p, std::string& out) {
        if (!v.is_string()) throw Error(ErrorKind::Config, p + ": expected a string");
        out = v.get<std::string>();
    }
    static void read(const json& v, const std::string& p, std::optional<double>& out) {
        if (v.is_null()) {
            out.reset();
            return;
        }
        double d = 0;
        read(v, p, d);
        out = d;
    }
    static void read(const json& v, const std::string& p, Point2& out) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw Error(ErrorKind::Config, p + ": expected [x, y]");
        out = {v[0].get<double>(), v[1].get<double>()};
    }
    static void read(const json& v, const std::string& p, GridResolution& out) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned())
            throw Error(ErrorKind::Config, p + ": expected [nx, ny]");
        out = {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
    }
    static void read(const json& v, const std::string& p, std::vector<double>& out) {
        if (!v.is_array()) throw Error(ErrorKind::Config, p + ": expected an array of numbers");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double d = 0;
            read(v[i], p + "[" + std::to_string(i) + "]", d);
            out.push_back(d);
        }
    }
    static void read(const json& v, const std::string& p, SpectralWeight& out) {
        std::string s;
        read(v, p, s);
        for (auto w : {SpectralWeight::OmegaHalf, SpectralWeight::Flat, SpectralWeight::PulseF1Derivative})
            if (s == to_string(w)) {
                out = w;
                return;
            }
        throw Error(ErrorKind::Config, p + ": expected omega_half, flat or pulse_f1_derivative");
    }
    static void read(const json& v, const std::string& p, ProfileKind& out) {
        std::string s;
        read(v, p, s);
        for (auto k : {ProfileKind::Constant, ProfileKind::PowerLaw, ProfileKind::ClampedDecay})
            if (s == to_string(k)) {
                out = k;
                return;
            }
        throw Error(ErrorKind::Config, p + ": expected constant, power_law or clamped_decay");
    }
    static void read(const json& v, const std::string& p, ThresholdRule::Mode& out) {
        std::string s;
        read(v, p, s);
        if (s == "fraction") out = ThresholdRule::Mode::FractionOfPeak;
        else if (s == "absolute") out = ThresholdRule::Mode::Absolute;
        else throw Error(ErrorKind::Config, p + ": expected fraction or absolute");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline json point(Point2 p) { return json::array({p.x, p.y}); }
inline json grid(GridResolution g) { return json::array({g.nx, g.ny}); }

}  // namespace config_detail

inline RunConfig config_from_json(const nlohmann::json& j) {
    using config_detail::Reader;
    RunConfig c;
    Reader root(j, "");
    root.object("material", [&](Reader& r) {
        r.get("youngs_modulus", c.material.youngs_modulus);
        r.get("density", c.material.density);
        r.get("poisson", c.material.poisson);
        r.get("thickness", c.material.thickness);
        r.get("damping_theta", c.material.damping_theta);
        r.get("dispersion_a", c.dispersion_a);
    });
    root.object("room", [&](Reader& r) {
        r.get("lx", c.room.lx);
        r.get("ly", c.room.ly);
    });
    if (j.contains("sensors")) {
        const auto& s = j.at("sensors");
        if (!s.is_array()) throw Error(ErrorKind::Config, "sensors: expected an array of [x, y]");
        std::vector<Point2> pts(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) Reader::read(s[i], "sensors[" + std::to_string(i) + "]", pts[i]);
        try {
            c.sensors = SensorArray(std::move(pts));
        } catch (const Error& e) {
            throw Error(ErrorKind::Config, std::string("sensors: ") + e.what());
        }
    }
    root.mark("sensors");
    root.object("synthesis", [&](Reader& r) {
        r.get("f_max", c.synthesis.f_max);
        r.get("n_terms", c.synthesis.n_terms);
        r.get("spectral_weight", c.synthesis.spectral_weight);
        r.get("pulse_duration", c.synthesis.pulse_duration);
        r.get("distances", c.synth_distances);
    });
    root.object("sampling", [&](Reader& r) {
        r.get("sample_rate", c.sampling.sample_rate);
        r.get("duration", c.sampling.duration);
        r.get("t0", c.sampling.t0);
    });
    root.object("bounded", [&](Reader& r) {
        r.object("room", [&](Reader& rr) {
            rr.get("lx", c.bounded.room.lx);
            rr.get("ly", c.bounded.room.ly);
        });
        r.get("source", c.bounded.source);
        r.get("sensor", c.bounded.sensor);
        r.get("p_max", c.bounded.p_max);
        r.get("q_max", c.bounded.q_max);
        r.get("spectral_weight", c.bounded.spectral_weight);
        r.get("duration", c.bounded.duration);
    });
    root.object("stft", [&](Reader& r) {
        r.get("window_len", c.stft.window_len);
        r.get("overlap", c.stft.overlap);
        r.get("fft_len", c.stft.fft_len);
    });
    root.object("detection", [&](Reader& r) {
        r.get("mode", c.detection.mode);
        r.get("value", c.detection.value);
        r.get("interpolate", c.detection.interpolate);
    });
    root.object("profile", [&](Reader& r) {
        r.get("kind", c.profile.kind);
        r.get("c0", c.profile.c0);
        r.get("a", c.profile.a);
        r.get("theta", c.profile.theta);
        r.get("c_near", c.profile.c_near);
        r.get("c_far", c.profile.c_far);
        r.get("d_knee", c.profile.d_knee);
    });
    root.object("velocity_curve", [&](Reader& r) {
        r.get("d_min", c.velocity_curve.d_min);
        r.get("d_max", c.velocity_curve.d_max);
        r.get("step", c.velocity_curve.step);
        r.get("level_fraction", c.velocity_curve.level_fraction);
        r.get("reference_distance", c.velocity_curve.reference_distance);
    });
    root.get("region_grid", c.region_grid);
    root.object("monte_carlo", [&](Reader& r) {
        r.get("source", c.monte_carlo.source);
        r.get("sigma_t", c.monte_carlo.sigma_t);
        r.get("runs", c.monte_carlo.runs);
        r.get("grid", c.monte_carlo.grid);
        r.get("c_hat", c.monte_carlo.c_hat);
        r.get("c_hat_sweep", c.monte_carlo.c_hat_sweep);
        std::size_t seed = c.monte_carlo.seed;
        r.get("seed", seed);
        c.monte_carlo.seed = seed;
        r.get("keep_runs", c.monte_carlo.keep_runs);
    });
    root.get("output_dir", c.output_dir);
    root.finish();
    try {
        c.validate();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        throw Error(ErrorKind::Config, e.what());
    }
    return c;
}

/// Canonical form: every key present, fixed key order (nlohmann sorts object keys).
inline nlohmann::json config_to_json(const RunConfig& c) {
    using config_detail::grid;
    using config_detail::point;
    using nlohmann::json;
    json sensors = json::array();
    for (const auto& p : c.sensors.positions()) sensors.push_back(point(p));
    return json{
        {"material",
         {{"youngs_modulus", c.material.youngs_modulus},
          {"density", c.material.density},
          {"poisson", c.material.poisson},
          {"thickness", c.material.thickness},
          {"damping_theta", c.material.damping_theta},
          {"dispersion_a", c.dispersion_a ? json(*c.dispersion_a) : json(nullptr)}}},
        {"room", {{"lx", c.room.lx}, {"ly", c.room.ly}}},
        {"sensors", sensors},
        {"synthesis",
         {{"f_max", c.synthesis.f_max},
          {"n_terms", c.synthesis.n_terms},
          {"spectral_weight", std::string(to_string(c.synthesis.spectral_weight))},
          {"pulse_duration", c.synthesis.pulse_duration},
          {"distances", c.synth_distances}}},
        {"sampling", {{"sample_rate", c.sampling.sample_rate}, {"duration", c.sampling.duration}, {"t0", c.sampling.t0}}},
        {"bounded",
         {{"room", {{"lx", c.bounded.room.lx}, {"ly", c.bounded.room.ly}}},
          {"source", point(c.bounded.source)},
          {"sensor", point(c.bounded.sensor)},
          {"p_max", c.bounded.p_max},
          {"q_max", c.bounded.q_max},
          {"spectral_weight", std::string(to_string(c.bounded.spectral_weight))},
          {"duration", c.bounded.duration}}},
        {"stft", {{"window_len", c.stft.window_len}, {"overlap", c.stft.overlap}, {"fft_len", c.stft.fft_len}}},
        {"detection",
         {{"mode", c.detection.mode == ThresholdRule::Mode::Absolute ? "absolute" : "fraction"},
          {"value", c.detection.value},
          {"interpolate", c.detection.interpolate}}},
        {"profile",
         {{"kind", std::string(to_string(c.profile.kind))},
          {"c0", c.profile.c0},
          {"a", c.profile.a},
          {"theta", c.profile.theta},
          {"c_near", c.profile.c_near},
          {"c_far", c.profile.c_far},
          {"d_knee", c.profile.d_knee}}},
        {"velocity_curve",
         {{"d_min", c.velocity_curve.d_min},
          {"d_max", c.velocity_curve.d_max},
          {"step", c.velocity_curve.step},
          {"level_fraction", c.velocity_curve.level_fraction},
          {"reference_distance", c.velocity_curve.reference_distance}}},
        {"region_grid", grid(c.region_grid)},
        {"monte_carlo",
         {{"source", point(c.monte_carlo.source)},
          {"sigma_t", c.monte_carlo.sigma_t},
          {"runs", c.monte_carlo.runs},
          {"grid", grid(c.monte_carlo.grid)},
          {"c_hat", c.monte_carlo.c_hat},
          {"c_hat_sweep", c.monte_carlo.c_hat_sweep},
          {"seed", c.monte_carlo.seed},
          {"keep_runs", c.monte_carlo.keep_runs}}},
        {"output_dir", c.output_dir},
    };
}

/// Parses config text; syntax errors report line and column.
inline RunConfig parse_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::ostringstream msg;
        msg << "line " << line << ", column " << col << ": " << e.what();
        throw Error(ErrorKind::Config, msg.str());
    }
    return config_from_json(j);
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config(ss.str());
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, path.string() + ": " + e.what());
    }
}

inline std::string serialize_config(const RunConfig& c) { return config_to_json(c).dump(2) + "\n"; }

}  // namespace slab
