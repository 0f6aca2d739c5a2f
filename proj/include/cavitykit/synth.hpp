#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "cavitykit/trace_analysis.hpp"

namespace cavitykit::synth {

// Deterministic forward-model generators for every record kind. The same
// seed always produces the same record.

// Displacement noise as an equal-amplitude random-phase cosine comb on the
// FFT bin grid inside [band_lo, band_hi], scaled to the requested total RMS,
// then mapped to intensity through the flank slope.
struct NoiseTraceParams {
    double sample_rate = 4096.0;  // [Hz]
    double duration = 2.0;        // [s]
    double flank_slope = 1e9;     // intensity per meter
    double intensity_offset = 1.0;
    double band_lo = 10.0;        // [Hz]
    double band_hi = 200.0;       // [Hz]
    double sigma = 56e-12;        // [m] total RMS displacement
};
trace::TimeTrace noise_trace(const NoiseTraceParams& p, std::uint64_t seed);

// Lorentzian lines on a constant baseline with relative Gaussian noise.
// Amplitudes are signed; negative values make reflection dips.
struct ResonanceScanParams {
    double x_min = 0.0, x_max = 1.0;
    int n_points = 2000;
    double baseline = 1.0;
    std::vector<double> centers;
    std::vector<double> fwhm;
    std::vector<double> amplitudes;
    double noise_rel = 0.0;  // Gaussian sigma relative to the largest |amplitude|
};
trace::Spectrum resonance_scan(const ResonanceScanParams& p, std::uint64_t seed);

// Cavity length scan: longitudinal modes lambda_m = 2 L(z)/m filtered by an
// emitter envelope. Past contact_z the length saturates (fiber in contact).
struct DispersionScanParams {
    double z_start = 0.0;
    double z_step = 20e-9;
    int n_z = 100;
    double L_start = 9e-6;  // optical length at z_start
    double dLdz = 1.0;
    double contact_z = std::numeric_limits<double>::quiet_NaN();  // NaN: no contact
    double lambda_min = 1.28e-6, lambda_max = 1.34e-6;
    int n_lambda = 1200;
    double mode_fwhm = 0.3e-9;
    double amplitude = 1000.0;
    std::vector<double> emitter_centers;  // spectral envelope lines
    double emitter_fwhm = 1e-9;
    double envelope_floor = 0.2;  // off-line envelope level
    double background = 5.0;
    double noise_rel = 0.0;
};
trace::DispersionScan dispersion_scan(const DispersionScanParams& p, std::uint64_t seed);

// Mono-exponential decay convolved with a Gaussian IRF, Poisson counts.
struct DecayParams {
    double bin_width = 20e-12;  // [s]
    int n_bins = 600;
    double t0 = 1e-9;           // excitation time
    double tau = 1.0e-9;        // [s]
    double peak_counts = 1e4;
    double background = 10.0;
    double irf_fwhm = 0.0;      // [s]; 0 = delta (no IRF column emitted)
    bool poisson = true;
};
trace::DecayHistogram decay_histogram(const DecayParams& p, std::uint64_t seed);

// Pulsed coincidence comb with Gaussian peaks, optional blinking bunching
// envelope (1 + blink_b exp(-|t|/blink_tau)) on the side peaks. The central
// area is g2_center times the mean of the n_norm nearest side-peak areas.
struct G2Params {
    double bin_width = 0.1e-9;  // [s]
    double rep_period = 12.5e-9;
    int n_side = 15;            // side peaks per sign
    double peak_sigma = 0.5e-9; // Gaussian peak width [s]
    double side_area = 1000.0;  // base counts per side peak
    double g2_center = 0.3;
    int n_norm = 10;            // side peaks entering the central-area reference
    double blink_b = 0.0;
    double blink_tau = 50e-9;
    bool poisson = false;
};
trace::CoincidenceHistogram g2_histogram(const G2Params& p, std::uint64_t seed);

}  // namespace cavitykit::synth
