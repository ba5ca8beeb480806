// Acceptance run: one line per criterion, exit status 1 if any hard criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "slab/arrival_detection.hpp"
#include "slab/codeword.hpp"
#include "slab/config.hpp"
#include "slab/envelope_analysis.hpp"
#include "slab/experiment_harness.hpp"
#include "slab/plate_model.hpp"
#include "slab/region_partition.hpp"
#include "slab/wavefield_synth.hpp"

using namespace slab;

namespace {

int hard_failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail, bool hard = true) {
    const char* tag = pass ? "PASS" : (hard ? "FAIL" : "SOFT-FAIL");
    std::printf("criterion %d [%s] %s: %s\n", id, tag, name, detail.c_str());
    std::fflush(stdout);
    if (!pass && hard) ++hard_failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void constants_golden() {
    const double a = derive_constants({}).dispersion_a;
    report(1, "dispersion coefficient", std::abs(a - 183.0) <= 1.0, fmt("a = %.3f m^2/s, want 183 +/- 1", a));
}

void velocity_law() {
    const auto c = derive_constants({});
    double worst = 0.0;
    for (double theta : {1e-5, 1e-4})
        for (double d : {5.0, 10.0, 15.0, 20.0}) {
            const double cp = perceived_velocity(d, c, theta);
            const double t = d / cp;
            const double d_num = envelope_argmax_distance(t, c, theta, 0.1 * d, 10.0 * d);
            worst = std::max(worst, std::abs(d_num / t - cp) / cp);
        }
    report(2, "perceived velocity law", worst < 5e-3,
           fmt("max |c_numeric - c_p| / c_p = %.2e over 4 distances x 2 theta, want < 5e-3", worst));
}

// One threshold for both sensors, as a fixed detector level would be: delta = f times the peak
// of the farther (weaker) trace, so both traces cross it. The hard check uses the interpolated
// crossing; the sample-grid crossing (50 us steps) is reported alongside, since pairs closer
// than about 0.1 m arrive within one sample of each other.
void order_preservation() {
    const RunConfig cfg;
    const auto c = cfg.constants();
    const double theta = cfg.material.damping_theta;
    const auto grid = cfg.sampling.grid();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ud(5.0, 20.0), uf(0.05, 0.50);
    int violations = 0, grid_ties = 0, grid_reversals = 0;
    for (int k = 0; k < 200; ++k) {
        double d1 = ud(rng), d2 = ud(rng);
        if (d1 > d2) std::swap(d1, d2);
        const double f = uf(rng);
        const auto w1 = synth_free(d1, grid, c, theta, cfg.synthesis);
        const auto w2 = synth_free(d2, grid, c, theta, cfg.synthesis);
        const double delta = f * w2.peak_abs();
        const double t1 = detect_toa(w1, ThresholdRule::absolute(delta, true)).time;
        const double t2 = detect_toa(w2, ThresholdRule::absolute(delta, true)).time;
        const double s1 = detect_toa(w1, delta).time, s2 = detect_toa(w2, delta).time;
        grid_ties += s1 == s2;
        grid_reversals += s1 > s2;
        if (!(t1 < t2)) {
            ++violations;
            std::printf("  order violation: d1=%.3f d2=%.3f f=%.3f t1=%.6g t2=%.6g\n", d1, d2, f, t1, t2);
        }
    }
    report(3, "TOA order preservation", violations == 0,
           fmt("%d of 200 random pairs out of order (common threshold 5-50%% of the farther peak, interpolated "
               "crossing); on the sample grid: %d ties, %d reversals",
               violations, grid_ties, grid_reversals));
}

void sign_identity() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 10.0), ua(100.0, 300.0), ut(1e-6, 1e-4);
    std::uniform_int_distribution<int> un(3, 9);
    int mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        std::vector<Point2> pos(static_cast<std::size_t>(un(rng)));
        for (auto& p : pos) p = {u(rng), u(rng)};
        const SensorArray sensors(pos);
        const Point2 src{u(rng), u(rng)};
        const auto geo = characteristic_vector(src, sensors);
        const double knee = 0.5 + u(rng) / 2.0;
        for (const auto& prof :
             {VelocityProfile::power_law(ua(rng), ut(rng)), VelocityProfile::clamped_decay(2500.0, 300.0, knee)})
            mismatches += sign_vector(tdoa_from_toas(simulate_toas(src, sensors, prof))) != geo;
    }
    report(4, "sign identity", mismatches == 0,
           fmt("%d mismatches over 1000 layouts x 2 decreasing profiles", mismatches));
}

void codebook_goldens() {
    const auto mr = region_upper_bound(5);
    const auto q2 = enumerate_regions({10.0, 10.0}, SensorArray({{2.0, 3.0}, {7.0, 6.0}}), {200, 200}).size();
    const auto h = hamming(CharacteristicVector::parse("-----+-+++"), CharacteristicVector::parse("----++-+++"));
    report(5, "codebook goldens", mr == 56 && q2 == 2 && h == 1,
           fmt("M_R(5) = %zu (want 56), Q(2 sensors) = %zu (want 2), Hamming(z1, z2) = %zu (want 1)", mr, q2, h));
    const SensorArray square({{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}, {10.0, 10.0}, {5.0, 5.0}});
    const auto q = enumerate_regions({10.0, 10.0}, square, {200, 200}).size();
    report(5, "corners-plus-center square Q (soft)", q == 16, fmt("Q = %zu, want 16", q), false);
}

void monte_carlo_headline() {
    const RunConfig cfg;
    auto mc = cfg.monte_carlo_config();
    mc.sigma_t_list = {1e-3};
    mc.runs = 500;
    mc.algorithms = {Algorithm::SoTdoaRegion, Algorithm::SoTdoaGrid};
    const auto map = enumerate_regions(mc.room, mc.sensors, mc.region_grid);
    double worst = 0.0;
    std::string detail;
    for (std::uint64_t seed : {1, 2, 3}) {
        mc.rng_seed = seed;
        const auto rep = run_monte_carlo(mc, &map);
        const double r = *rep.rmse(Algorithm::SoTdoaRegion, 1e-3);
        worst = std::max(worst, r);
        detail += fmt("seed %llu: %.3f m (grid variant %.3f m); ", static_cast<unsigned long long>(seed), r,
                      *rep.rmse(Algorithm::SoTdoaGrid, 1e-3));
    }
    detail += fmt("want <= 1.8 m on every seed (headline 1.5 m %s)", worst < 1.5 ? "met" : "not met");
    report(6, "Monte Carlo SO-TDOA RMSE at 1 ms", worst <= 1.8, detail);
}

void robustness_contrast() {
    const RunConfig cfg;
    auto mc = cfg.monte_carlo_config();
    mc.sigma_t_list = {0.5e-3};
    mc.runs = 500;
    mc.rng_seed = 1;
    const auto map = enumerate_regions(mc.room, mc.sensors, mc.region_grid);

    mc.algorithms = {Algorithm::SoTdoaRegion};
    std::vector<double> so;
    for (const auto& prof : {VelocityProfile::constant(1000.0), VelocityProfile::power_law(183.0, 1e-5),
                             VelocityProfile::clamped_decay(2000.0, 500.0, 3.0)}) {
        mc.profile = prof;
        so.push_back(*run_monte_carlo(mc, &map).rmse(Algorithm::SoTdoaRegion, 0.5e-3));
    }
    const bool identical = so[0] == so[1] && so[1] == so[2];

    mc.profile = VelocityProfile::power_law(183.0, 1e-5);
    mc.algorithms = {Algorithm::Hyperbolic};
    std::vector<double> hyp;
    for (double ch : {500.0, 1000.0, 2000.0}) {
        mc.c_hat = ch;
        hyp.push_back(*run_monte_carlo(mc, &map).rmse(Algorithm::Hyperbolic, 0.5e-3));
    }
    const auto [lo, hi] = std::minmax_element(hyp.begin(), hyp.end());
    const double spread = (*hi - *lo) / *lo;

    report(7, "robustness contrast", identical && spread > 0.10,
           fmt("SO-TDOA RMSE constant/power_law/clamped = %.17g / %.17g / %.17g (%s); "
               "hyperbolic RMSE at c_hat 500/1000/2000 = %.3f / %.3f / %.3f, spread %.1f%% (want > 10%%)",
               so[0], so[1], so[2], identical ? "bit-identical" : "not bit-identical", hyp[0], hyp[1], hyp[2],
               100.0 * spread));
}

// Chirp measure: the first 50 ms are cut into 5 ms blocks; each block's magnitude spectra are
// averaged over its frames and the peak taken above the DC bin. Blocks holding less than 1% of
// the strongest block's energy are skipped. The peak may rise by at most one bin between
// consecutive kept blocks. Energies are taken after removing the waveform mean, since the
// zero-frequency term of the flat weighting is a constant offset, not a travelling wave.
struct ChirpCheck {
    std::vector<double> block_peaks_hz;
    int rises = 0;
};

ChirpCheck chirp_check(const Waveform& w, const StftParams& p) {
    const auto s = stft(w, p);
    const double block = 5e-3, span = 50e-3;
    const double df = w.sample_rate / static_cast<double>(p.fft_len);
    std::vector<std::vector<double>> spectra;
    std::vector<double> energy;
    for (double b0 = w.t0; b0 < w.t0 + span - 1e-12; b0 += block) {
        std::vector<double> avg(s.bins(), 0.0);
        int n = 0;
        for (std::size_t f = 0; f < s.frames(); ++f)
            if (s.frame_times[f] >= b0 && s.frame_times[f] < b0 + block) {
                for (std::size_t b = 0; b < s.bins(); ++b) avg[b] += s.at(b, f);
                ++n;
            }
        double e = 0.0;
        for (std::size_t b = 1; b < s.bins(); ++b) {
            avg[b] /= std::max(n, 1);
            e += avg[b] * avg[b];
        }
        spectra.push_back(avg);
        energy.push_back(e);
    }
    const double emax = *std::max_element(energy.begin(), energy.end());
    ChirpCheck out;
    std::size_t prev = 0;
    bool have_prev = false;
    for (std::size_t k = 0; k < spectra.size(); ++k) {
        if (energy[k] < 0.01 * emax) continue;
        const auto it = std::max_element(spectra[k].begin() + 1, spectra[k].end());
        const auto bin = static_cast<std::size_t>(it - spectra[k].begin());
        out.block_peaks_hz.push_back(static_cast<double>(bin) * df);
        if (have_prev && bin > prev + 1) ++out.rises;
        prev = bin;
        have_prev = true;
    }
    return out;
}

double ac_energy(const Waveform& w) {
    double m = 0.0;
    for (double v : w.samples) m += v;
    m /= static_cast<double>(w.size());
    double e = 0.0;
    for (double v : w.samples) e += (v - m) * (v - m);
    return e;
}

void bounded_spectrogram() {
    const RunConfig cfg;
    const auto& b = cfg.bounded;
    auto params = cfg.synthesis;
    params.spectral_weight = b.spectral_weight;
    const auto grid = TimeGrid::from_duration(0.0, cfg.sampling.sample_rate, b.duration);
    auto run = [&](double theta) {
        auto m = cfg.material;
        m.damping_theta = theta;
        const auto c = derive_constants(m);
        return synth_bounded(b.room, b.source, b.sensor, c, theta, params, b.p_max, b.q_max, grid);
    };
    const auto w5 = run(1e-5);
    const auto chirp = chirp_check(w5, cfg.stft);
    std::string peaks;
    for (double f : chirp.block_peaks_hz) peaks += fmt("%.0f ", f);
    const double e4 = ac_energy(run(1e-4)), e6 = ac_energy(run(1e-6));
    const double db = 10.0 * std::log10(e6 / e4);
    report(8, "bounded-plate spectrogram", chirp.rises == 0 && db >= 20.0,
           fmt("5 ms block peak frequencies over the first 50 ms: [ %s] Hz, %d rises beyond one bin (want 0); "
               "energy(theta=1e-6) / energy(theta=1e-4) = %.1f dB (want >= 20 dB)",
               peaks.c_str(), chirp.rises, db));
}

}  // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    constants_golden();
    velocity_law();
    order_preservation();
    sign_identity();
    codebook_goldens();
    monte_carlo_headline();
    robustness_contrast();
    bounded_spectrogram();
    std::printf("criterion 9 [NOT-REPRODUCIBLE] field-test localization errors: needs the physical recordings, "
                "covered by criteria 3 to 7\n");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d hard criteria failed, %.1f s\n", hard_failures, secs);
    return hard_failures ? 1 : 0;
}
