#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cavitykit/fitting.hpp"

namespace cavitykit::trace {

// ---------------------------------------------------------------- records

struct TimeTrace {
    double sample_rate = 0.0;          // [Hz]
    std::vector<double> samples;       // intensity, arbitrary linear units
    std::optional<double> flank_slope; // intensity per meter of displacement

    void validate() const;
    double duration() const { return samples.size() / sample_rate; }
};

struct Spectrum {
    std::vector<double> wavelength;  // [m], strictly increasing
    std::vector<double> counts;      // >= 0
    double integration_time = 0.0;   // [s], 0 when unknown

    void validate() const;
};

struct DispersionScan {
    std::vector<double> z_set;      // [m], strictly monotone setpoints
    std::vector<Spectrum> spectra;  // one per setpoint
    double excitation_wavelength = 0.0;
    double step_size = 0.0;

    void validate() const;
};

struct DecayHistogram {
    std::vector<double> time;    // [s], uniform bins
    std::vector<double> counts;  // >= 0
    std::vector<double> irf;     // same grid; empty when not recorded

    void validate() const;
    double bin_width() const;
};

struct CoincidenceHistogram {
    std::vector<double> delay;   // [s], uniform bins
    std::vector<double> counts;  // >= 0
    double rep_period = 0.0;     // [s]

    void validate() const;
    double bin_width() const;
};

// -------------------------------------------------------------- noise PSD

enum class Window { hann, rectangular };

struct NoiseOptions {
    Window window = Window::hann;
    double band_lo = 0.0;  // [Hz] band for the total sigma; 0 = from first bin
    double band_hi = 0.0;  // [Hz]; 0 = up to Nyquist
    std::vector<double> baseline_psd;  // noise floor, subtracted bin-wise when given
};

struct NoiseResult {
    std::vector<double> frequency;       // [Hz] one-sided, DC excluded
    std::vector<double> psd;             // displacement PSD [m^2/Hz]
    std::vector<double> cumulative_rms;  // [m], running integral of the PSD
    double total_sigma = 0.0;            // [m] band-limited RMS displacement
    std::string warning;
};

// Converts the intensity trace to displacement via the flank slope, then a
// windowed one-sided periodogram on the largest power-of-two prefix. The
// cumulative curve is sqrt of the running PSD integral.
NoiseResult noise_spectrum(const TimeTrace& trace, const NoiseOptions& opt = {});

// --------------------------------------------------------- resonance fits

struct LorentzianLine {
    double center = 0.0;
    double fwhm = 0.0;
    double amplitude = 0.0;  // signed; negative for dips
    double center_sigma = 0.0;
    double fwhm_sigma = 0.0;
    double amplitude_sigma = 0.0;
};

struct ResonanceFitOptions {
    double prominence = 0.2;  // minimum peak depth, relative to data range
    int max_lines = 8;
};

struct ResonanceFit {
    double baseline = 0.0;
    std::vector<LorentzianLine> lines;  // sorted by center
    double finesse = 0.0;   // spacing / mean FWHM of the two dominant lines; 0 if < 2 lines
    double contrast = 0.0;  // depth of the dominant dip relative to the baseline
    double residual_norm = 0.0;
    int iterations = 0;
};

// Multi-Lorentzian fit on an arbitrary abscissa (wavelength, length, ...),
// seeded from prominence-based peak detection. Works on dips and peaks.
ResonanceFit resonance_fit(const std::vector<double>& x, const std::vector<double>& y,
                           const ResonanceFitOptions& opt = {});
ResonanceFit resonance_fit(const Spectrum& spectrum, const ResonanceFitOptions& opt = {});

// ------------------------------------------------------- dispersion scans

struct DispersionOptions {
    double peak_prominence = 0.2;
    double contact_sigma = 3.0;  // residual threshold in units of the ridge-fit RMS
    int contact_run = 3;         // consecutive outliers required
};

struct DispersionResult {
    std::vector<double> z_set;
    std::vector<double> L_opt;          // [m]; NaN where fewer than 2 modes
    std::vector<int> mode_number;       // longest-wavelength mode index; -1 if unknown
    std::vector<double> ridge;          // dominant-mode wavelength per spectrum [m]
    bool length_calibrated = false;     // false when no spectrum had 2 modes
    double z_scale = 0.0, z_offset = 0.0;  // affine z_set -> optical length map
    bool contact_detected = false;
    std::size_t contact_index = 0;
    double L_contact = 0.0;  // [m]
    Spectrum summed;
    std::string warning;
};

DispersionResult dispersion_analyze(const DispersionScan& scan,
                                    const DispersionOptions& opt = {});

// ------------------------------------------------------------ decay fits

struct DecayFitOptions {
    // fit window start [s]; NaN = peak position + 2 IRF FWHM (or the peak bin
    // itself with no IRF)
    double window_start = std::numeric_limits<double>::quiet_NaN();
    double window_end = std::numeric_limits<double>::quiet_NaN();  // NaN = last bin
    bool use_irf = true;  // set false to force the bare exponential model
};

struct DecayFitResult {
    double tau = 0.0;         // [s]
    double tau_sigma = 0.0;   // statistical, from the likelihood curvature
    double amplitude = 0.0;   // counts at the window start
    double background = 0.0;  // counts per bin
    double nll = 0.0;         // Poisson negative log-likelihood at the optimum
    std::size_t window_first = 0, window_last = 0;  // fitted bin range, inclusive
    bool at_bounds = false;
    std::string warning;
};

// Mono-exponential decay, convolved with the IRF when present, fitted by
// Poisson maximum likelihood.
DecayFitResult decay_fit(const DecayHistogram& hist, const DecayFitOptions& opt = {});

// ----------------------------------------------------------------- g2

struct G2Options {
    int n_side_peaks = 10;
};

struct G2Result {
    double g2 = 0.0;             // central area / mean side-peak area
    double central_area = 0.0;
    double mean_side_area = 0.0;
    std::vector<double> side_delays;  // comb positions used [s]
    std::vector<double> side_areas;
    double on_fraction = 1.0;    // blinking duty cycle from the bunching envelope
    bool envelope_fitted = false;
    std::string warning;
};

// Peak-area analysis of a pulsed coincidence histogram. Areas are summed in
// windows of +-rep_period/4 around each comb position; the bunching envelope
// A(1 + b exp(-|t|/tau_b)) over all resolvable side peaks gives the
// on-fraction 1/(1+b).
G2Result g2_raw(const CoincidenceHistogram& hist, const G2Options& opt = {});

}  // namespace cavitykit::trace
