#pragma once

// Onset picking, TOA tables, and magnitude spectrograms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slab/codeword.hpp"
#include "slab/error.hpp"
#include "slab/fft.hpp"
#include "slab/waveform.hpp"

namespace slab {

enum class ToaMethod { Threshold, EnvelopeMax };

constexpr std::string_view to_string(ToaMethod m) {
    return m == ToaMethod::Threshold ? "threshold" : "envelope_max";
}

struct ToaEstimate {
    double time = 0.0;
    ToaMethod method = ToaMethod::Threshold;
    std::optional<double> threshold_used;
};

struct ThresholdRule {
    enum class Mode { Absolute, FractionOfPeak };
    Mode mode = Mode::FractionOfPeak;
    double value = 0.1;
    // Linear interpolation of the crossing between the last quiet and first loud sample.
    bool interpolate = false;

    static ThresholdRule absolute(double delta, bool interp = false) { return {Mode::Absolute, delta, interp}; }
    static ThresholdRule fraction(double f, bool interp = false) { return {Mode::FractionOfPeak, f, interp}; }

    double level_for(const Waveform& w) const { return mode == Mode::Absolute ? value : value * w.peak_abs(); }
};

/// Time of the first sample whose magnitude exceeds `rule`'s level.
inline ToaEstimate detect_toa(const Waveform& w, const ThresholdRule& rule) {
    w.validate();
    if (!(rule.value > 0.0)) throw Error(ErrorKind::InvalidArgument, "threshold must be > 0");
    const double delta = rule.level_for(w);
    const auto it = std::find_if(w.samples.begin(), w.samples.end(), [&](double v) { return std::abs(v) > delta; });
    if (it == w.samples.end()) throw Error(ErrorKind::NoOnset, "no sample exceeds the threshold");
    const auto idx = static_cast<std::size_t>(it - w.samples.begin());
    double t = w.time(idx);
    if (rule.interpolate && idx > 0) {
        const double lo = std::abs(w.samples[idx - 1]);
        const double hi = std::abs(w.samples[idx]);
        t = w.time(idx - 1) + (delta - lo) / (hi - lo) / w.sample_rate;
    }
    return {t, ToaMethod::Threshold, delta};
}

inline ToaEstimate detect_toa(const Waveform& w, double delta) { return detect_toa(w, ThresholdRule::absolute(delta)); }

/// Time of the largest |sample|.
inline ToaEstimate detect_peak(const Waveform& w) {
    w.validate();
    const auto it = std::max_element(w.samples.begin(), w.samples.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    return {w.time(static_cast<std::size_t>(it - w.samples.begin())), ToaMethod::EnvelopeMax, std::nullopt};
}

inline void write_toa_table(std::ostream& os, const std::vector<ToaEstimate>& toas) {
    os << "sensor_id,toa_s,method\n" << std::setprecision(17);
    for (std::size_t i = 0; i < toas.size(); ++i)
        os << i + 1 << ',' << toas[i].time << ',' << to_string(toas[i].method) << '\n';
}

/// Reads sensor_id,toa_s[,method]; ids must cover 1..N exactly once. Returned in id order.
inline std::vector<double> read_toa_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("sensor_id", 0) != 0)
        throw Error(ErrorKind::Io, "TOA table must start with a sensor_id,toa_s header");
    std::map<long, double> by_id;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string id_s, toa_s;
        if (!std::getline(row, id_s, ',') || !std::getline(row, toa_s, ','))
            throw Error(ErrorKind::Io, "bad TOA row: " + line);
        try {
            std::size_t used = 0;
            const long id = std::stol(id_s, &used);
            const double toa = std::stod(toa_s);
            if (!std::isfinite(toa)) throw Error(ErrorKind::Io, "non-finite TOA: " + line);
            if (!by_id.emplace(id, toa).second) throw Error(ErrorKind::Io, "duplicate sensor id in TOA table");
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Io, "bad TOA row: " + line);
        }
    }
    std::vector<double> out;
    long expect = 1;
    for (const auto& [id, toa] : by_id) {
        if (id != expect++) throw Error(ErrorKind::Io, "TOA table sensor ids must be 1..N");
        out.push_back(toa);
    }
    if (out.empty()) throw Error(ErrorKind::Io, "TOA table is empty");
    return out;
}

struct StftParams {
    std::size_t window_len = 128;
    std::size_t overlap = 126;
    std::size_t fft_len = 128;

    friend bool operator==(const StftParams&, const StftParams&) = default;

    std::size_t hop() const { return window_len - overlap; }
    void validate() const {
        if (window_len == 0 || overlap >= window_len || window_len > fft_len)
            throw Error(ErrorKind::InvalidArgument, "STFT needs overlap < window_len <= fft_len");
    }
};

/// Magnitudes indexed [bin][frame]; one-sided, fft_len/2 + 1 bins.
struct Spectrogram {
    std::vector<double> bin_freqs;    // Hz
    std::vector<double> frame_times;  // s, window centres
    std::vector<double> magnitudes;   // bins * frames, row-major by bin

    std::size_t bins() const { return bin_freqs.size(); }
    std::size_t frames() const { return frame_times.size(); }
    double at(std::size_t bin, std::size_t frame) const { return magnitudes[bin * frames() + frame]; }
    double& at(std::size_t bin, std::size_t frame) { return magnitudes[bin * frames() + frame]; }

    std::size_t peak_bin(std::size_t frame) const {
        std::size_t best = 0;
        for (std::size_t b = 1; b < bins(); ++b)
            if (at(b, frame) > at(best, frame)) best = b;
        return best;
    }
    double frame_energy(std::size_t frame) const {
        double e = 0.0;
        for (std::size_t b = 0; b < bins(); ++b) e += at(b, frame) * at(b, frame);
        return e;
    }
};

inline std::vector<double> hamming_window(std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (n == 1) return w;
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
    return w;
}

/// Hamming-windowed magnitude STFT; windows overrunning the end are dropped.
inline Spectrogram stft(const Waveform& w, const StftParams& p = {}) {
    p.validate();
    w.validate();
    if (w.size() < p.window_len) throw Error(ErrorKind::InsufficientSamples, "signal shorter than one window");
    const std::size_t frames = (w.size() - p.window_len) / p.hop() + 1;
    const std::size_t bins = p.fft_len / 2 + 1;
    const auto win = hamming_window(p.window_len);

    Spectrogram s;
    s.bin_freqs.resize(bins);
    for (std::size_t b = 0; b < bins; ++b)
        s.bin_freqs[b] = static_cast<double>(b) * w.sample_rate / static_cast<double>(p.fft_len);
    s.frame_times.resize(frames);
    s.magnitudes.assign(bins * frames, 0.0);

    std::vector<std::complex<double>> buf(p.fft_len);
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * p.hop();
        s.frame_times[f] = w.t0 + (static_cast<double>(start) + 0.5 * static_cast<double>(p.window_len)) / w.sample_rate;
        std::fill(buf.begin(), buf.end(), std::complex<double>{});
        for (std::size_t i = 0; i < p.window_len; ++i) buf[i] = w.samples[start + i] * win[i];
        detail::fft_inplace(buf);
        for (std::size_t b = 0; b < bins; ++b) s.at(b, f) = std::abs(buf[b]);
    }
    return s;
}

/// First row: corner label then frame times; each following row: bin frequency then magnitudes.
inline void write_spectrogram_csv(std::ostream& os, const Spectrogram& s) {
    os << std::setprecision(10) << "freq_hz\\time_s";
    for (double t : s.frame_times) os << ',' << t;
    os << '\n';
    for (std::size_t b = 0; b < s.bins(); ++b) {
        os << s.bin_freqs[b];
        for (std::size_t f = 0; f < s.frames(); ++f) os << ',' << s.at(b, f);
        os << '\n';
    }
}

}  // namespace slab
