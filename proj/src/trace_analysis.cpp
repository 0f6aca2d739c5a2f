#include "cavitykit/trace_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#include "cavitykit/cavity_metrics.hpp"
#include "cavitykit/constants.hpp"

namespace cavitykit::trace {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_uniform(const std::vector<double>& t, const char* what) {
    require(t.size() >= 2, "histogram needs at least 2 bins");
    const double dt = t[1] - t[0];
    require(dt > 0, "bin grid must be increasing");
    for (std::size_t i = 2; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
            throw std::invalid_argument(std::string(what) + ": bins are not uniform");
}

// in-place iterative radix-2 FFT, n a power of two
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * kPi / static_cast<double>(len);
        const std::complex<double> wl{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

struct DetectedPeak {
    std::size_t index = 0;
    double x = 0.0;        // refined position
    double height = 0.0;   // above baseline, oriented upward
    double fwhm = 0.0;
};

// topographic prominence of a local maximum: height above the key saddle on
// the way to higher ground; a noise bump on a taller peak's flank scores only
// its own bump height, not the full height above the baseline
double peak_prominence_at(const std::vector<double>& u, std::size_t i) {
    const std::size_t n = u.size();
    double left_min = u[i], right_min = u[i];
    bool left_higher = false, right_higher = false;
    for (std::size_t j = i; j-- > 0;) {
        if (u[j] > u[i]) {
            left_higher = true;
            break;
        }
        left_min = std::min(left_min, u[j]);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
        if (u[j] > u[i]) {
            right_higher = true;
            break;
        }
        right_min = std::min(right_min, u[j]);
    }
    double key;
    if (left_higher && right_higher)
        key = std::max(left_min, right_min);
    else if (left_higher)
        key = left_min;
    else if (right_higher)
        key = right_min;
    else
        key = std::min(left_min, right_min);
    return u[i] - key;
}

// prominence-based local-maximum detection on an upward-oriented signal
std::vector<DetectedPeak> find_peaks(const std::vector<double>& x, const std::vector<double>& u,
                                     double baseline, double range, double prominence) {
    std::vector<DetectedPeak> peaks;
    const std::size_t n = u.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(u[i] >= u[i - 1] && u[i] > u[i + 1])) continue;
        const double height = u[i] - baseline;
        if (height < prominence * range) continue;
        if (peak_prominence_at(u, i) < prominence * range) continue;

        DetectedPeak p;
        p.index = i;
        p.height = height;
        // parabolic refinement through the three samples around the maximum
        const double d1 = u[i] - u[i - 1], d2 = u[i] - u[i + 1];
        const double denom = d1 + d2;
        double frac = 0.0;
        if (denom > 0) frac = 0.5 * (d1 - d2) / denom;
        p.x = x[i] + frac * (x[std::min(i + 1, n - 1)] - x[i - 1]) * 0.5;

        // half-maximum crossings for the width seed
        const double half = baseline + 0.5 * height;
        std::size_t l = i, r = i;
        while (l > 0 && u[l] > half) --l;
        while (r + 1 < n && u[r] > half) ++r;
        double xl = x[l], xr = x[r];
        if (u[l + 1] != u[l]) xl = x[l] + (half - u[l]) / (u[l + 1] - u[l]) * (x[l + 1] - x[l]);
        if (r > 0 && u[r - 1] != u[r])
            xr = x[r - 1] + (half - u[r - 1]) / (u[r] - u[r - 1]) * (x[r] - x[r - 1]);
        p.fwhm = std::max(xr - xl, std::abs(x[1] - x[0]));
        peaks.push_back(p);
    }
    return peaks;
}

// noise throws extra local maxima inside a peak's own footprint; keep only
// the tallest peak within each width neighborhood (result ordered by height)
std::vector<DetectedPeak> strongest_isolated(std::vector<DetectedPeak> peaks) {
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& a, const auto& b) { return a.height > b.height; });
    std::vector<DetectedPeak> kept;
    for (const auto& pk : peaks) {
        bool shadowed = false;
        for (const auto& k : kept)
            if (std::abs(pk.x - k.x) < 0.7 * std::max(pk.fwhm, k.fwhm)) {
                shadowed = true;
                break;
            }
        if (!shadowed) kept.push_back(pk);
    }
    return kept;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t m = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + m, v.end());
    return v[m];
}

}  // namespace

// ------------------------------------------------------------- validation

void TimeTrace::validate() const {
    require(sample_rate > 0, "TimeTrace: sample_rate must be > 0");
    require(samples.size() >= 2, "TimeTrace: need at least 2 samples");
}

void Spectrum::validate() const {
    require(wavelength.size() == counts.size(), "Spectrum: array length mismatch");
    require(wavelength.size() >= 2, "Spectrum: need at least 2 points");
    for (std::size_t i = 1; i < wavelength.size(); ++i)
        require(wavelength[i] > wavelength[i - 1], "Spectrum: wavelength not increasing");
    for (double c : counts) require(c >= 0, "Spectrum: negative counts");
}

void DispersionScan::validate() const {
    require(z_set.size() == spectra.size(), "DispersionScan: setpoint/spectrum mismatch");
    require(z_set.size() >= 2, "DispersionScan: need at least 2 spectra");
    const bool up = z_set[1] > z_set[0];
    for (std::size_t i = 1; i < z_set.size(); ++i)
        require(up ? z_set[i] > z_set[i - 1] : z_set[i] < z_set[i - 1],
                "DispersionScan: z_set not strictly monotone");
    for (const auto& s : spectra) s.validate();
}

void DecayHistogram::validate() const {
    require(time.size() == counts.size(), "DecayHistogram: array length mismatch");
    check_uniform(time, "DecayHistogram");
    for (double c : counts) require(c >= 0, "DecayHistogram: negative counts");
    if (!irf.empty()) {
        require(irf.size() == time.size(), "DecayHistogram: IRF grid mismatch");
        for (double c : irf) require(c >= 0, "DecayHistogram: negative IRF counts");
    }
}

double DecayHistogram::bin_width() const { return time[1] - time[0]; }

void CoincidenceHistogram::validate() const {
    require(delay.size() == counts.size(), "CoincidenceHistogram: array length mismatch");
    check_uniform(delay, "CoincidenceHistogram");
    require(rep_period > 0, "CoincidenceHistogram: rep_period must be > 0");
    for (double c : counts) require(c >= 0, "CoincidenceHistogram: negative counts");
}

double CoincidenceHistogram::bin_width() const { return delay[1] - delay[0]; }

// -------------------------------------------------------------- noise PSD

NoiseResult noise_spectrum(const TimeTrace& trace, const NoiseOptions& opt) {
    trace.validate();
    if (!trace.flank_slope || *trace.flank_slope == 0.0)
        throw std::invalid_argument("noise_spectrum: missing flank-slope calibration");

    NoiseResult out;
    if (trace.duration() < 1.0) out.warning = "trace shorter than 1 s";
    if (opt.band_lo > 0 && trace.duration() < 10.0 / opt.band_lo) {
        if (!out.warning.empty()) out.warning += "; ";
        out.warning += "trace shorter than 10 periods of the lowest requested frequency";
    }

    std::size_t n = 1;
    while (n * 2 <= trace.samples.size()) n *= 2;
    if (n < 4) throw std::invalid_argument("noise_spectrum: trace too short");

    const double slope = *trace.flank_slope;
    std::vector<double> x(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = trace.samples[i] / slope;
        mean += x[i];
    }
    mean /= static_cast<double>(n);

    std::vector<std::complex<double>> spec(n);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (opt.window == Window::hann)
            w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
        wsum2 += w * w;
        spec[i] = w * (x[i] - mean);
    }
    fft_radix2(spec);

    const double fs = trace.sample_rate;
    const double df = fs / static_cast<double>(n);
    const double norm = 1.0 / (fs * wsum2);
    const std::size_t nbins = n / 2;  // k = 1 .. n/2, DC excluded
    out.frequency.resize(nbins);
    out.psd.resize(nbins);
    for (std::size_t k = 1; k <= nbins; ++k) {
        const double mag2 = std::norm(spec[k]);
        out.frequency[k - 1] = static_cast<double>(k) * df;
        out.psd[k - 1] = (k == nbins ? 1.0 : 2.0) * mag2 * norm;
    }

    if (!opt.baseline_psd.empty()) {
        if (opt.baseline_psd.size() != nbins)
            throw std::invalid_argument("noise_spectrum: baseline PSD bin count mismatch");
        for (std::size_t k = 0; k < nbins; ++k)
            out.psd[k] = std::max(out.psd[k] - opt.baseline_psd[k], 0.0);
    }

    out.cumulative_rms.resize(nbins);
    double acc = 0.0;
    double band = 0.0;
    const double hi = opt.band_hi > 0 ? opt.band_hi : out.frequency.back();
    for (std::size_t k = 0; k < nbins; ++k) {
        acc += out.psd[k] * df;
        out.cumulative_rms[k] = std::sqrt(acc);
        if (out.frequency[k] >= opt.band_lo && out.frequency[k] <= hi) band += out.psd[k] * df;
    }
    out.total_sigma = std::sqrt(band);
    return out;
}

// --------------------------------------------------------- resonance fits

ResonanceFit resonance_fit(const std::vector<double>& x, const std::vector<double>& y,
                           const ResonanceFitOptions& opt) {
    require(x.size() == y.size() && x.size() >= 8, "resonance_fit: need matched arrays, >= 8 points");

    const double ymin = *std::min_element(y.begin(), y.end());
    const double ymax = *std::max_element(y.begin(), y.end());
    const double med = median_of(y);
    const double range = ymax - ymin;
    require(range > 0, "resonance_fit: flat data");

    const bool dips = (med - ymin) > (ymax - med);
    std::vector<double> u(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) u[i] = dips ? med - y[i] : y[i] - med;

    auto peaks = strongest_isolated(find_peaks(x, u, 0.0, range, opt.prominence));
    if (peaks.empty()) throw std::invalid_argument("resonance_fit: no peaks above prominence threshold");
    if (static_cast<int>(peaks.size()) > opt.max_lines) peaks.resize(opt.max_lines);
    std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) { return a.x < b.x; });

    // fit in a normalized abscissa so the finite-difference steps of the
    // optimizer are commensurate with the data span regardless of units
    const double x0 = x.front();
    const double xs = x.back() - x.front();
    require(xs > 0, "resonance_fit: abscissa must span a nonzero range");
    std::vector<double> xn(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xn[i] = (x[i] - x0) / xs;

    struct Seed {
        double A, c, w;  // scaled coordinates
    };
    std::vector<Seed> seeds;
    for (const auto& pk : peaks)
        seeds.push_back({dips ? -pk.height : pk.height, (pk.x - x0) / xs, pk.fwhm / xs});

    fitting::LMOptions lmopt;
    lmopt.tol = 1e-11;
    lmopt.max_iterations = 2000;

    ResonanceFit out;
    auto run_fit = [&](const std::vector<Seed>& s) {
        // parameters: baseline, then (amplitude, center, fwhm) per line
        std::vector<double> p0;
        p0.push_back(med);
        for (const auto& sd : s) {
            p0.push_back(sd.A);
            p0.push_back(sd.c);
            p0.push_back(sd.w);
        }
        const std::size_t nl = s.size();
        auto model = [&, nl](const std::vector<double>& p) {
            std::vector<double> f(xn.size(), p[0]);
            for (std::size_t k = 0; k < nl; ++k) {
                const double A = p[1 + 3 * k], c = p[2 + 3 * k], w = p[3 + 3 * k];
                for (std::size_t i = 0; i < xn.size(); ++i) {
                    const double q = 2.0 * (xn[i] - c) / w;
                    f[i] += A / (1.0 + q * q);
                }
            }
            return f;
        };
        auto fit = fitting::levenberg_marquardt(model, y, {}, p0, lmopt);
        if (!fit.converged)
            throw std::runtime_error("resonance_fit: no convergence, residual chi2 = " +
                                     std::to_string(fit.objective));
        out.baseline = fit.params[0];
        out.iterations = fit.iterations;
        out.residual_norm = std::sqrt(fit.objective);
        out.lines.clear();
        for (std::size_t k = 0; k < nl; ++k) {
            LorentzianLine line;
            line.amplitude = fit.params[1 + 3 * k];
            line.center = x0 + fit.params[2 + 3 * k] * xs;
            line.fwhm = std::abs(fit.params[3 + 3 * k]) * xs;
            line.amplitude_sigma = fit.uncertainties[1 + 3 * k];
            line.center_sigma = fit.uncertainties[2 + 3 * k] * xs;
            line.fwhm_sigma = fit.uncertainties[3 + 3 * k] * xs;
            out.lines.push_back(line);
        }
        std::sort(out.lines.begin(), out.lines.end(),
                  [](const auto& a, const auto& b) { return a.center < b.center; });
    };

    auto merge_and_prune = [&]() {
        bool changed = false;
        // the optimizer can park two seeded lines on the same feature with
        // large canceling amplitudes; such degenerate pairs act as one line
        for (std::size_t i = 0; i + 1 < out.lines.size();) {
            auto& a = out.lines[i];
            auto& b = out.lines[i + 1];
            if (std::abs(a.center - b.center) < 0.25 * (a.fwhm + b.fwhm)) {
                const double wa = std::abs(a.amplitude), wb = std::abs(b.amplitude);
                const double wsum = std::max(wa + wb, 1e-300);
                a.center = (wa * a.center + wb * b.center) / wsum;
                a.fwhm = (wa * a.fwhm + wb * b.fwhm) / wsum;
                a.amplitude += b.amplitude;
                // individual sigmas of a canceling pair are meaningless; a
                // refit assigns the merged line a fresh uncertainty
                a.amplitude_sigma = 0.0;
                a.center_sigma = std::max(a.center_sigma, b.center_sigma);
                a.fwhm_sigma = std::max(a.fwhm_sigma, b.fwhm_sigma);
                out.lines.erase(out.lines.begin() + static_cast<std::ptrdiff_t>(i + 1));
                changed = true;
            } else {
                ++i;
            }
        }
        // drop sub-resolution spikes and statistically insignificant lines,
        // but never everything
        const double min_width = 2.0 * xs / static_cast<double>(x.size() - 1);
        std::vector<LorentzianLine> kept_lines;
        for (const auto& l : out.lines) {
            if (l.fwhm < min_width) continue;
            if (l.amplitude_sigma > 0 && std::abs(l.amplitude) < 2.0 * l.amplitude_sigma) continue;
            kept_lines.push_back(l);
        }
        if (!kept_lines.empty() && kept_lines.size() != out.lines.size()) {
            out.lines = std::move(kept_lines);
            changed = true;
        }
        return changed;
    };

    run_fit(seeds);
    if (merge_and_prune() && !out.lines.empty()) {
        std::vector<Seed> again;
        for (const auto& l : out.lines)
            again.push_back({l.amplitude, (l.center - x0) / xs, l.fwhm / xs});
        run_fit(again);
        merge_and_prune();
    }

    // dominant line for the contrast, two dominant lines for the finesse
    std::vector<std::size_t> by_depth(out.lines.size());
    std::iota(by_depth.begin(), by_depth.end(), 0u);
    std::sort(by_depth.begin(), by_depth.end(), [&](auto a, auto b) {
        return std::abs(out.lines[a].amplitude) > std::abs(out.lines[b].amplitude);
    });
    const auto& dom = out.lines[by_depth[0]];
    if (dom.amplitude < 0 && out.baseline > 0)
        out.contrast = -dom.amplitude / out.baseline;
    else if (dom.amplitude > 0 && out.baseline + dom.amplitude > 0)
        out.contrast = dom.amplitude / (out.baseline + dom.amplitude);
    if (out.lines.size() >= 2) {
        const auto& a = out.lines[by_depth[0]];
        const auto& b = out.lines[by_depth[1]];
        const double spacing = std::abs(a.center - b.center);
        const double mean_fwhm = 0.5 * (a.fwhm + b.fwhm);
        out.finesse = spacing / mean_fwhm;
    }
    return out;
}

ResonanceFit resonance_fit(const Spectrum& spectrum, const ResonanceFitOptions& opt) {
    spectrum.validate();
    return resonance_fit(spectrum.wavelength, spectrum.counts, opt);
}

// ------------------------------------------------------- dispersion scans

DispersionResult dispersion_analyze(const DispersionScan& scan, const DispersionOptions& opt) {
    scan.validate();
    const std::size_t ns = scan.spectra.size();

    DispersionResult out;
    out.z_set = scan.z_set;
    out.L_opt.assign(ns, kNaN);
    out.mode_number.assign(ns, -1);
    out.ridge.assign(ns, kNaN);

    // peak positions per spectrum; the dominant ridge is tracked by
    // extrapolating from the previous two spectra
    std::vector<std::vector<DetectedPeak>> all_peaks(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        const auto& sp = scan.spectra[i];
        const double cmax = *std::max_element(sp.counts.begin(), sp.counts.end());
        const double cmin = *std::min_element(sp.counts.begin(), sp.counts.end());
        if (cmax <= cmin) continue;
        auto pk = strongest_isolated(
            find_peaks(sp.wavelength, sp.counts, cmin, cmax - cmin, opt.peak_prominence));
        // a single-sample noise spike can clear the prominence cut; a resolved
        // line must span at least two grid steps at half maximum
        const double min_width =
            2.0 * (sp.wavelength.back() - sp.wavelength.front()) / (sp.wavelength.size() - 1);
        pk.erase(std::remove_if(pk.begin(), pk.end(),
                                [&](const DetectedPeak& q) { return q.fwhm < min_width; }),
                 pk.end());
        all_peaks[i] = std::move(pk);
    }

    std::size_t n_two_mode = 0;
    for (std::size_t i = 0; i < ns; ++i) {
        auto& pk = all_peaks[i];
        if (pk.empty()) continue;

        // ridge continuation
        double target;
        if (i >= 2 && std::isfinite(out.ridge[i - 1]) && std::isfinite(out.ridge[i - 2]))
            target = 2.0 * out.ridge[i - 1] - out.ridge[i - 2];
        else if (i >= 1 && std::isfinite(out.ridge[i - 1]))
            target = out.ridge[i - 1];
        else
            target = std::max_element(pk.begin(), pk.end(), [](const auto& a, const auto& b) {
                         return a.height < b.height;
                     })->x;
        out.ridge[i] = std::min_element(pk.begin(), pk.end(), [&](const auto& a, const auto& b) {
                           return std::abs(a.x - target) < std::abs(b.x - target);
                       })->x;

        if (pk.size() >= 2) {
            // two longest-wavelength peaks are consecutive longitudinal modes
            std::sort(pk.begin(), pk.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
            const double l1 = pk[pk.size() - 2].x, l2 = pk[pk.size() - 1].x;
            out.L_opt[i] = metrics::optical_length_from_resonances(l1, l2);
            out.mode_number[i] = static_cast<int>(std::lround(2.0 * out.L_opt[i] / l2));
            ++n_two_mode;
        }
    }

    // contact detection on the optical length: unlike the ridge, L_opt is
    // continuous when the tracked mode hands off to its neighbor, so a kink
    // toward constant length is unambiguous. Expanding linear fit in z,
    // outliers beyond contact_sigma times the fit RMS for contact_run
    // consecutive steps.
    {
        std::vector<std::size_t> good;
        for (std::size_t i = 0; i < ns; ++i)
            if (std::isfinite(out.L_opt[i])) good.push_back(i);
        const std::size_t warmup = std::max<std::size_t>(opt.contact_run + 3, 10);
        if (good.size() > warmup) {
            double span = 0.0;
            for (auto i : good) span = std::max(span, std::abs(out.L_opt[i]));
            const double floor_sigma = 1e-9 * span;

            // accepted points define the approach line; rejected outliers are
            // never folded back in, otherwise the fit would slowly tilt into
            // the flat post-contact region and mask the kink
            std::vector<std::size_t> accepted(good.begin(),
                                              good.begin() + static_cast<std::ptrdiff_t>(warmup));
            int run = 0;
            std::size_t run_start = 0;
            double run_sign = 0.0, run_mag = 0.0;
            for (std::size_t next = warmup; next < good.size(); ++next) {
                double sx = 0, sy = 0, sxx = 0, sxy = 0;
                for (auto j : accepted) {
                    const double xi = scan.z_set[j];
                    sx += xi;
                    sy += out.L_opt[j];
                    sxx += xi * xi;
                    sxy += xi * out.L_opt[j];
                }
                const double nn = static_cast<double>(accepted.size());
                const double det = nn * sxx - sx * sx;
                const double slope = (nn * sxy - sx * sy) / det;
                const double icpt = (sy - slope * sx) / nn;
                double ss = 0.0;
                for (auto j : accepted) {
                    const double r = out.L_opt[j] - (icpt + slope * scan.z_set[j]);
                    ss += r * r;
                }
                // two fitted parameters eat two degrees of freedom; without the
                // correction a short warmup underestimates the scatter
                const double rms = std::max(std::sqrt(ss / std::max(nn - 2.0, 1.0)), floor_sigma);

                const std::size_t i = good[next];
                const double resid = out.L_opt[i] - (icpt + slope * scan.z_set[i]);
                // a kink bends one way and keeps growing, so a run only counts
                // outliers of one sign with non-shrinking magnitude; random
                // noise excursions rarely line up like that
                if (std::abs(resid) > opt.contact_sigma * rms) {
                    const bool continues = run > 0 && resid * run_sign > 0.0 &&
                                           std::abs(resid) >= 0.8 * run_mag;
                    if (continues) {
                        ++run;
                    } else {
                        run = 1;
                        run_start = i;
                        run_sign = resid > 0 ? 1.0 : -1.0;
                    }
                    run_mag = std::abs(resid);
                    if (run >= opt.contact_run) {
                        out.contact_detected = true;
                        out.contact_index = run_start;
                        break;
                    }
                } else {
                    run = 0;
                    accepted.push_back(i);
                }
            }
        }
    }

    // length calibration from the spectra alone
    if (n_two_mode >= 2) {
        out.length_calibrated = true;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        double nn = 0;
        for (std::size_t i = 0; i < ns; ++i) {
            if (!std::isfinite(out.L_opt[i])) continue;
            if (out.contact_detected && i >= out.contact_index) continue;
            sx += scan.z_set[i];
            sy += out.L_opt[i];
            sxx += scan.z_set[i] * scan.z_set[i];
            sxy += scan.z_set[i] * out.L_opt[i];
            nn += 1.0;
        }
        const double det = nn * sxx - sx * sx;
        if (nn >= 2 && det != 0) {
            out.z_scale = (nn * sxy - sx * sy) / det;
            out.z_offset = (sy - out.z_scale * sx) / nn;
        } else {
            out.length_calibrated = false;
        }
    }
    if (!out.length_calibrated)
        out.warning = "single-mode scan: length scale not calibrated from spectra";

    if (out.contact_detected) {
        const std::size_t ci = out.contact_index;
        if (std::isfinite(out.L_opt[ci]))
            out.L_contact = out.L_opt[ci];
        else if (out.length_calibrated)
            out.L_contact = out.z_scale * scan.z_set[ci] + out.z_offset;
    }

    // reconstructed spectrum: bin-wise sum over the scan
    const auto& grid = scan.spectra.front().wavelength;
    for (const auto& sp : scan.spectra)
        if (sp.wavelength.size() != grid.size() ||
            !std::equal(sp.wavelength.begin(), sp.wavelength.end(), grid.begin(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }))
            throw std::invalid_argument("dispersion_analyze: spectra are not on a common grid");
    out.summed.wavelength = grid;
    out.summed.counts.assign(grid.size(), 0.0);
    for (const auto& sp : scan.spectra)
        for (std::size_t j = 0; j < grid.size(); ++j) out.summed.counts[j] += sp.counts[j];

    return out;
}

// ------------------------------------------------------------ decay fits

DecayFitResult decay_fit(const DecayHistogram& hist, const DecayFitOptions& opt) {
    hist.validate();
    const std::size_t n = hist.time.size();
    const double dt = hist.bin_width();
    const bool with_irf = opt.use_irf && !hist.irf.empty();

    const std::size_t peak_bin = static_cast<std::size_t>(
        std::max_element(hist.counts.begin(), hist.counts.end()) - hist.counts.begin());

    double irf_fwhm = 0.0;
    std::vector<double> q;  // normalized IRF
    if (with_irf) {
        const double isum = std::accumulate(hist.irf.begin(), hist.irf.end(), 0.0);
        require(isum > 0, "decay_fit: IRF has no counts");
        q.resize(n);
        for (std::size_t i = 0; i < n; ++i) q[i] = hist.irf[i] / isum;
        const double imax = *std::max_element(q.begin(), q.end());
        const double half = 0.5 * imax;
        std::size_t ip = static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
        std::size_t l = ip, r = ip;
        while (l > 0 && q[l] > half) --l;
        while (r + 1 < n && q[r] > half) ++r;
        irf_fwhm = (static_cast<double>(r) - static_cast<double>(l)) * dt;
    }

    double t_start = opt.window_start;
    if (std::isnan(t_start)) t_start = hist.time[peak_bin] + 2.0 * irf_fwhm;
    double t_end = std::isnan(opt.window_end) ? hist.time.back() : opt.window_end;

    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (hist.time[i] >= t_start && hist.time[i] <= t_end) {
            first = std::min(first, i);
            last = std::max(last, i);
        }
    if (first >= n || last < first + 5)
        throw std::invalid_argument("decay_fit: fit window excludes the data");

    // initial guesses
    double bg0 = 0.0;
    const std::size_t tail = std::max<std::size_t>(1, (last - first) / 20);
    for (std::size_t i = last - tail + 1; i <= last; ++i) bg0 += hist.counts[i];
    bg0 = std::max(bg0 / static_cast<double>(tail), 1e-3);
    double A0 = std::max(hist.counts[first] - bg0, 1.0);
    double tau0 = 0.2 * (hist.time[last] - hist.time[first]);
    for (std::size_t i = first; i <= last; ++i)
        if (hist.counts[i] < bg0 + A0 / std::exp(1.0)) {
            if (i > first) tau0 = hist.time[i] - hist.time[first];
            break;
        }
    tau0 = std::max(tau0, dt);

    // model in the fit window; the convolution runs on the full grid
    auto model_window = [&](double tau, double A, double bg) {
        std::vector<double> m(last - first + 1);
        if (!with_irf) {
            for (std::size_t i = first; i <= last; ++i)
                m[i - first] = bg + A * std::exp(-(hist.time[i] - hist.time[first]) / tau);
            return m;
        }
        std::vector<double> conv(n, 0.0);
        double cmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j <= i; ++j) {
                if (q[j] == 0.0) continue;
                s += q[j] * std::exp(-(hist.time[i] - hist.time[j]) / tau);
            }
            conv[i] = s;
            cmax = std::max(cmax, s);
        }
        if (cmax <= 0) cmax = 1.0;
        for (std::size_t i = first; i <= last; ++i) m[i - first] = bg + A * conv[i] / cmax;
        return m;
    };

    // scaled parameters keep the simplex well conditioned and make the fit
    // exactly invariant under a common count rescaling
    auto nll = [&](const std::vector<double>& p) {
        const double tau = p[0] * tau0, A = p[1] * A0, bg = p[2] * bg0;
        if (tau <= 0 || A <= 0 || bg < 0) return 1e30;
        const auto m = model_window(tau, A, bg);
        double s = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
            const double mi = std::max(m[i - first], 1e-12);
            s += mi - hist.counts[i] * std::log(mi);
        }
        return s;
    };

    fitting::NMOptions nmopt;
    nmopt.tol = 1e-13;
    nmopt.max_iterations = 8000;
    auto fit = fitting::nelder_mead(nll, {1.0, 1.0, 1.0}, nmopt);

    DecayFitResult out;
    out.tau = fit.params[0] * tau0;
    out.amplitude = fit.params[1] * A0;
    out.background = fit.params[2] * bg0;
    out.nll = fit.objective;
    out.window_first = first;
    out.window_last = last;
    out.tau_sigma = fit.uncertainties.empty() ? 0.0 : fit.uncertainties[0] * tau0;

    const double span = hist.time[last] - hist.time[first];
    if (out.tau < 0.1 * dt || out.tau > 10.0 * span) {
        out.at_bounds = true;
        out.warning = "decay time at the edge of the resolvable range";
    }
    if (!fit.converged) {
        if (!out.warning.empty()) out.warning += "; ";
        out.warning += "likelihood optimization did not converge";
    }
    return out;
}

// ----------------------------------------------------------------- g2

G2Result g2_raw(const CoincidenceHistogram& hist, const G2Options& opt) {
    hist.validate();
    require(opt.n_side_peaks >= 1, "g2_raw: need at least 1 side peak");
    const double T = hist.rep_period;
    const double quarter = 0.25 * T;
    const double lo = hist.delay.front(), hi = hist.delay.back();

    auto area = [&](double pos) {
        double s = 0.0;
        for (std::size_t i = 0; i < hist.delay.size(); ++i)
            if (std::abs(hist.delay[i] - pos) <= quarter) s += hist.counts[i];
        return s;
    };
    auto in_span = [&](double pos) { return pos - quarter >= lo && pos + quarter <= hi; };

    G2Result out;
    require(in_span(0.0), "g2_raw: central peak not covered by the histogram");
    out.central_area = area(0.0);

    // nearest side peaks first, alternating sides
    int collected = 0;
    for (int m = 1; collected < opt.n_side_peaks; ++m) {
        bool any = false;
        for (double sign : {1.0, -1.0}) {
            const double pos = sign * m * T;
            if (!in_span(pos)) continue;
            any = true;
            if (collected >= opt.n_side_peaks) break;
            out.side_delays.push_back(pos);
            out.side_areas.push_back(area(pos));
            ++collected;
        }
        if (!any)
            throw std::invalid_argument("g2_raw: requested side peaks exceed the histogram span");
    }
    out.mean_side_area =
        std::accumulate(out.side_areas.begin(), out.side_areas.end(), 0.0) / out.side_areas.size();
    require(out.mean_side_area > 0, "g2_raw: empty side peaks");
    out.g2 = out.central_area / out.mean_side_area;

    // comb resolvability check via the width of the tallest side peak
    {
        double best_pos = out.side_delays[0], best_area = -1.0;
        for (std::size_t k = 0; k < out.side_delays.size(); ++k)
            if (out.side_areas[k] > best_area) {
                best_area = out.side_areas[k];
                best_pos = out.side_delays[k];
            }
        double pmax = 0.0;
        std::size_t ip = 0;
        for (std::size_t i = 0; i < hist.delay.size(); ++i)
            if (std::abs(hist.delay[i] - best_pos) <= quarter && hist.counts[i] > pmax) {
                pmax = hist.counts[i];
                ip = i;
            }
        if (pmax > 0) {
            std::size_t l = ip, r = ip;
            while (l > 0 && hist.counts[l] > 0.5 * pmax && hist.delay[ip] - hist.delay[l] <= quarter)
                --l;
            while (r + 1 < hist.delay.size() && hist.counts[r] > 0.5 * pmax &&
                   hist.delay[r] - hist.delay[ip] <= quarter)
                ++r;
            const double width = hist.delay[r] - hist.delay[l];
            if (T < 4.0 * width)
                out.warning = "side peaks overlap: rep_period < 4x peak width, raw value unreliable";
        }
    }

    // blinking envelope over every comb position in the span
    std::vector<double> env_t, env_a;
    for (int m = 1;; ++m) {
        bool any = false;
        for (double sign : {1.0, -1.0}) {
            const double pos = sign * m * T;
            if (!in_span(pos)) continue;
            any = true;
            env_t.push_back(std::abs(pos));
            env_a.push_back(area(pos));
        }
        if (!any) break;
    }
    if (env_t.size() >= 6) {
        const double a_far = *std::max_element(env_a.end() - 2, env_a.end());
        const double a_near = env_a.front();
        std::vector<double> p0 = {std::max(a_far, 1.0),
                                  std::max(a_near / std::max(a_far, 1.0) - 1.0, 1e-3),
                                  *std::max_element(env_t.begin(), env_t.end()) / 3.0};
        auto model = [&](const std::vector<double>& p) {
            std::vector<double> f(env_t.size());
            for (std::size_t i = 0; i < env_t.size(); ++i)
                f[i] = p[0] * (1.0 + p[1] * std::exp(-env_t[i] / p[2]));
            return f;
        };
        try {
            auto fit = fitting::levenberg_marquardt(model, env_a, {}, p0);
            if (fit.converged && fit.params[2] > 0) {
                out.envelope_fitted = true;
                out.on_fraction = 1.0 / (1.0 + std::max(fit.params[1], 0.0));
            }
        } catch (const std::exception&) {
            // envelope is optional; leave on_fraction at 1
        }
    }
    return out;
}

}  // namespace cavitykit::trace
