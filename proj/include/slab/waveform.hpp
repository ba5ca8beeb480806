#pragma once

// Uniformly sampled trace plus the CSV and binary formats used to exchange it.
//
// Binary layout (little-endian):
//   bytes 0..7   magic "SLABWAV1"
//   bytes 8..15  sample_rate, IEEE-754 double
//   bytes 16..23 count, uint64
//   then count IEEE-754 doubles
// t0 is not stored; readers get t0 = 0.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "slab/error.hpp"

namespace slab {

struct TimeGrid {
    double t0 = 0.0;
    double sample_rate = 20000.0;  // Hz
    std::size_t count = 0;

    double dt() const { return 1.0 / sample_rate; }
    double at(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }

    static TimeGrid from_duration(double t0, double sample_rate, double duration) {
        return {t0, sample_rate, static_cast<std::size_t>(std::llround(duration * sample_rate))};
    }

    /// Recovers (t0, rate) from explicit sample times; they must be uniform to 1e-6 relative.
    static TimeGrid from_times(std::span<const double> times) {
        if (times.empty()) throw Error(ErrorKind::EmptyInput, "time grid is empty");
        if (times.size() < 2)
            throw Error(ErrorKind::NonUniformGrid, "cannot infer a sample rate from one time point");
        const double step = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        if (!(step > 0.0)) throw Error(ErrorKind::NonUniformGrid, "time grid must be increasing");
        for (std::size_t i = 1; i < times.size(); ++i)
            if (std::abs((times[i] - times[i - 1]) - step) > 1e-6 * step)
                throw Error(ErrorKind::NonUniformGrid, "time grid spacing is not uniform");
        return {times.front(), 1.0 / step, times.size()};
    }
};

struct Waveform {
    double sample_rate = 0.0;
    double t0 = 0.0;
    std::vector<double> samples;

    double time(std::size_t i) const { return t0 + static_cast<double>(i) / sample_rate; }
    std::size_t size() const { return samples.size(); }

    void validate() const {
        if (!(sample_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "sample_rate must be > 0");
        if (samples.empty()) throw Error(ErrorKind::EmptyInput, "waveform has no samples");
        for (double v : samples)
            if (!std::isfinite(v)) throw Error(ErrorKind::NonPhysical, "waveform contains non-finite samples");
    }

    double peak_abs() const {
        double m = 0.0;
        for (double v : samples) m = std::max(m, std::abs(v));
        return m;
    }

    double energy() const {
        double e = 0.0;
        for (double v : samples) e += v * v;
        return e;
    }
};

inline void write_waveform_csv(std::ostream& os, const Waveform& w) {
    os << "time_s,amplitude\n" << std::setprecision(17);
    for (std::size_t i = 0; i < w.size(); ++i) os << w.time(i) << ',' << w.samples[i] << '\n';
}

inline constexpr std::array<char, 8> kWaveMagic{'S', 'L', 'A', 'B', 'W', 'A', 'V', '1'};

namespace detail {
template <typename T>
void put_le(std::ostream& os, T value) {
    static_assert(sizeof(T) == 8);
    auto bits = std::bit_cast<std::uint64_t>(value);
    char buf[8];
    for (int b = 0; b < 8; ++b) buf[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    os.write(buf, 8);
}

template <typename T>
T get_le(std::istream& is) {
    static_assert(sizeof(T) == 8);
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8)) throw Error(ErrorKind::Io, "truncated waveform file");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
    return std::bit_cast<T>(bits);
}
}  // namespace detail

inline void write_waveform_binary(std::ostream& os, const Waveform& w) {
    os.write(kWaveMagic.data(), kWaveMagic.size());
    detail::put_le(os, w.sample_rate);
    detail::put_le(os, static_cast<std::uint64_t>(w.samples.size()));
    for (double v : w.samples) detail::put_le(os, v);
    if (!os) throw Error(ErrorKind::Io, "failed writing waveform");
}

inline Waveform read_waveform_binary(std::istream& is) {
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kWaveMagic)
        throw Error(ErrorKind::Io, "bad waveform magic");
    Waveform w;
    w.sample_rate = detail::get_le<double>(is);
    const auto count = detail::get_le<std::uint64_t>(is);
    if (count > (std::uint64_t{1} << 40)) throw Error(ErrorKind::Io, "implausible sample count");
    w.samples.resize(static_cast<std::size_t>(count));
    for (auto& v : w.samples) v = detail::get_le<double>(is);
    return w;
}

inline Waveform read_waveform_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::Io, "empty waveform csv");
    std::vector<double> t, v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        double ti = 0, vi = 0;
        char comma = 0;
        if (!(row >> ti >> comma >> vi) || comma != ',') throw Error(ErrorKind::Io, "bad waveform csv row: " + line);
        t.push_back(ti);
        v.push_back(vi);
    }
    const auto grid = TimeGrid::from_times(t);
    return {grid.sample_rate, grid.t0, std::move(v)};
}

}  // namespace slab
