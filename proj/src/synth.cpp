#include "cavitykit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cavitykit/constants.hpp"

namespace cavitykit::synth {

namespace {

double lorentzian(double x, double center, double fwhm) {
    const double q = 2.0 * (x - center) / fwhm;
    return 1.0 / (1.0 + q * q);
}

}  // namespace

trace::TimeTrace noise_trace(const NoiseTraceParams& p, std::uint64_t seed) {
    if (!(p.sample_rate > 0) || !(p.duration > 0) || p.flank_slope == 0.0)
        throw std::invalid_argument("noise_trace: bad parameters");
    if (!(p.band_hi > p.band_lo) || p.band_lo < 0)
        throw std::invalid_argument("noise_trace: bad band");

    const std::size_t n = static_cast<std::size_t>(std::llround(p.sample_rate * p.duration));
    std::size_t n2 = 1;
    while (n2 * 2 <= n) n2 *= 2;
    const double df = p.sample_rate / static_cast<double>(n2);

    std::vector<double> freqs;
    for (double f = df; f <= 0.5 * p.sample_rate; f += df)
        if (f >= p.band_lo && f <= p.band_hi) freqs.push_back(f);
    if (freqs.empty()) throw std::invalid_argument("noise_trace: band contains no FFT bins");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<double> phases(freqs.size());
    for (auto& ph : phases) ph = phase(rng);

    // equal amplitudes; sum of a^2/2 gives sigma^2
    const double a = p.sigma * std::sqrt(2.0 / static_cast<double>(freqs.size()));

    trace::TimeTrace t;
    t.sample_rate = p.sample_rate;
    t.flank_slope = p.flank_slope;
    t.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) / p.sample_rate;
        double x = 0.0;
        for (std::size_t k = 0; k < freqs.size(); ++k)
            x += a * std::cos(2.0 * kPi * freqs[k] * ti + phases[k]);
        t.samples[i] = p.intensity_offset + p.flank_slope * x;
    }
    return t;
}

trace::Spectrum resonance_scan(const ResonanceScanParams& p, std::uint64_t seed) {
    if (p.n_points < 2 || !(p.x_max > p.x_min))
        throw std::invalid_argument("resonance_scan: bad grid");
    if (p.centers.size() != p.fwhm.size() || p.centers.size() != p.amplitudes.size())
        throw std::invalid_argument("resonance_scan: line parameter arrays differ in length");

    double amax = 0.0;
    for (double a : p.amplitudes) amax = std::max(amax, std::abs(a));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    trace::Spectrum s;
    s.wavelength.resize(p.n_points);
    s.counts.resize(p.n_points);
    const double dx = (p.x_max - p.x_min) / (p.n_points - 1);
    for (int i = 0; i < p.n_points; ++i) {
        const double x = p.x_min + i * dx;
        double y = p.baseline;
        for (std::size_t k = 0; k < p.centers.size(); ++k)
            y += p.amplitudes[k] * lorentzian(x, p.centers[k], p.fwhm[k]);
        if (p.noise_rel > 0) y += p.noise_rel * amax * gauss(rng);
        s.wavelength[i] = x;
        s.counts[i] = std::max(y, 0.0);
    }
    return s;
}

trace::DispersionScan dispersion_scan(const DispersionScanParams& p, std::uint64_t seed) {
    if (p.n_z < 2 || p.n_lambda < 2 || p.z_step == 0.0)
        throw std::invalid_argument("dispersion_scan: bad grid");
    if (!(p.lambda_max > p.lambda_min) || !(p.L_start > 0))
        throw std::invalid_argument("dispersion_scan: bad ranges");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<double> grid(p.n_lambda);
    const double dl = (p.lambda_max - p.lambda_min) / (p.n_lambda - 1);
    for (int j = 0; j < p.n_lambda; ++j) grid[j] = p.lambda_min + j * dl;

    auto envelope = [&](double lam) {
        if (p.emitter_centers.empty()) return 1.0;
        double e = p.envelope_floor;
        for (double c : p.emitter_centers) e += lorentzian(lam, c, p.emitter_fwhm);
        return e;
    };

    trace::DispersionScan scan;
    scan.step_size = p.z_step;
    for (int i = 0; i < p.n_z; ++i) {
        const double z = p.z_start + i * p.z_step;
        double z_eff = z;
        if (!std::isnan(p.contact_z) && z > p.contact_z) z_eff = p.contact_z;
        const double L = p.L_start + p.dLdz * (z_eff - p.z_start);

        trace::Spectrum s;
        s.wavelength = grid;
        s.counts.resize(grid.size());
        const int m_lo = std::max(1, static_cast<int>(std::ceil(2.0 * L / p.lambda_max)));
        const int m_hi = static_cast<int>(std::floor(2.0 * L / p.lambda_min));
        for (std::size_t j = 0; j < grid.size(); ++j) {
            double y = p.background;
            for (int m = m_lo; m <= m_hi; ++m) {
                const double lam_m = 2.0 * L / m;
                y += p.amplitude * envelope(lam_m) * lorentzian(grid[j], lam_m, p.mode_fwhm);
            }
            if (p.noise_rel > 0) y += p.noise_rel * p.amplitude * gauss(rng);
            s.counts[j] = std::max(y, 0.0);
        }
        scan.z_set.push_back(z);
        scan.spectra.push_back(std::move(s));
    }
    return scan;
}

trace::DecayHistogram decay_histogram(const DecayParams& p, std::uint64_t seed) {
    if (p.n_bins < 8 || !(p.bin_width > 0) || !(p.tau > 0))
        throw std::invalid_argument("decay_histogram: bad parameters");

    trace::DecayHistogram h;
    h.time.resize(p.n_bins);
    for (int i = 0; i < p.n_bins; ++i) h.time[i] = i * p.bin_width;

    std::vector<double> shape(p.n_bins, 0.0);
    if (p.irf_fwhm > 0) {
        const double s = p.irf_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        std::vector<double> irf(p.n_bins);
        double isum = 0.0;
        for (int i = 0; i < p.n_bins; ++i) {
            const double d = (h.time[i] - p.t0) / s;
            irf[i] = std::exp(-0.5 * d * d);
            isum += irf[i];
        }
        for (int i = 0; i < p.n_bins; ++i) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j)
                acc += irf[j] / isum * std::exp(-(h.time[i] - h.time[j]) / p.tau);
            shape[i] = acc;
        }
        h.irf.resize(p.n_bins);
        for (int i = 0; i < p.n_bins; ++i) h.irf[i] = 1e5 * irf[i] / isum;
    } else {
        for (int i = 0; i < p.n_bins; ++i)
            if (h.time[i] >= p.t0) shape[i] = std::exp(-(h.time[i] - p.t0) / p.tau);
    }
    const double smax = *std::max_element(shape.begin(), shape.end());

    std::mt19937_64 rng(seed);
    h.counts.resize(p.n_bins);
    for (int i = 0; i < p.n_bins; ++i) {
        const double mean = p.background + p.peak_counts * shape[i] / smax;
        if (p.poisson) {
            std::poisson_distribution<long> pois(mean);
            h.counts[i] = static_cast<double>(pois(rng));
        } else {
            h.counts[i] = mean;
        }
    }
    return h;
}

trace::CoincidenceHistogram g2_histogram(const G2Params& p, std::uint64_t seed) {
    if (!(p.bin_width > 0) || !(p.rep_period > 0) || p.n_side < 1 || p.n_norm < 1)
        throw std::invalid_argument("g2_histogram: bad parameters");
    if (!(p.peak_sigma > 0) || p.rep_period < 4.0 * p.peak_sigma)
        throw std::invalid_argument("g2_histogram: peaks would overlap");

    const double span = (p.n_side + 0.4) * p.rep_period;
    const int half_bins = static_cast<int>(std::ceil(span / p.bin_width));
    const int n_bins = 2 * half_bins + 1;

    trace::CoincidenceHistogram h;
    h.rep_period = p.rep_period;
    h.delay.resize(n_bins);
    h.counts.assign(n_bins, 0.0);
    for (int i = 0; i < n_bins; ++i) h.delay[i] = (i - half_bins) * p.bin_width;

    const double quarter = 0.25 * p.rep_period;
    auto deposit = [&](double pos, double total) {
        // Gaussian shape, renormalized over the +-T/4 window so the windowed
        // area equals the requested total exactly
        std::vector<int> idx;
        std::vector<double> w;
        double wsum = 0.0;
        for (int i = 0; i < n_bins; ++i) {
            const double d = h.delay[i] - pos;
            if (std::abs(d) > quarter) continue;
            const double g = std::exp(-0.5 * d * d / (p.peak_sigma * p.peak_sigma));
            idx.push_back(i);
            w.push_back(g);
            wsum += g;
        }
        for (std::size_t k = 0; k < idx.size(); ++k) h.counts[idx[k]] += total * w[k] / wsum;
    };

    auto side_total = [&](int m) {
        const double t = std::abs(m) * p.rep_period;
        double env = 1.0;
        if (p.blink_b > 0) env = 1.0 + p.blink_b * std::exp(-t / p.blink_tau);
        return p.side_area * env;
    };

    for (int m = 1; m <= p.n_side; ++m) {
        deposit(m * p.rep_period, side_total(m));
        deposit(-m * p.rep_period, side_total(-m));
    }
    // central area referenced to the analysis normalization
    double ref = 0.0;
    int counted = 0;
    for (int m = 1; counted < p.n_norm && m <= p.n_side; ++m)
        for (int sgn : {1, -1}) {
            if (counted >= p.n_norm) break;
            ref += side_total(sgn * m);
            ++counted;
        }
    ref /= counted;
    deposit(0.0, p.g2_center * ref);

    if (p.poisson) {
        std::mt19937_64 rng(seed);
        for (auto& c : h.counts) {
            if (c <= 0) continue;
            std::poisson_distribution<long> pois(c);
            c = static_cast<double>(pois(rng));
        }
    }
    return h;
}

}  // namespace cavitykit::synth
