#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "cavitykit/synth.hpp"
#include "cavitykit/trace_analysis.hpp"

namespace trace = cavitykit::trace;
namespace synth = cavitykit::synth;

// Seeded generator -> analyzer sweeps. Each record kind is produced with
// twenty different seeds and pushed through the matching analysis; the
// recovered parameter must stay inside a fixed envelope for every seed.

TEST_CASE("generators are deterministic for a fixed seed") {
    synth::DecayParams p;
    const auto a = synth::decay_histogram(p, 123);
    const auto b = synth::decay_histogram(p, 123);
    CHECK(a.counts == b.counts);
    const auto c = synth::decay_histogram(p, 124);
    CHECK(a.counts != c.counts);

    synth::NoiseTraceParams np;
    CHECK(synth::noise_trace(np, 9).samples == synth::noise_trace(np, 9).samples);
}

TEST_CASE("noise sigma recovery over 20 seeds") {
    synth::NoiseTraceParams p;
    p.duration = 4.0;
    p.sigma = 56e-12;
    trace::NoiseOptions opt;
    opt.band_lo = p.band_lo;
    opt.band_hi = p.band_hi;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto res = trace::noise_spectrum(synth::noise_trace(p, seed), opt);
        CHECK(res.total_sigma == doctest::Approx(56e-12).epsilon(0.05));
    }
}

TEST_CASE("lifetime recovery over 20 seeds at realistic counts") {
    synth::DecayParams p;
    p.tau = 1.007e-9;
    p.irf_fwhm = 0.12e-9;
    p.bin_width = 4e-12;
    p.n_bins = 1500;
    p.t0 = 0.5e-9;
    p.peak_counts = 2e4;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto fit = trace::decay_fit(synth::decay_histogram(p, seed));
        CHECK(fit.tau == doctest::Approx(1.007e-9).epsilon(0.02));
        CHECK(!fit.at_bounds);
    }
}

TEST_CASE("g2 recovery over 20 seeds") {
    synth::G2Params p;
    p.g2_center = 0.31;
    p.side_area = 5000.0;
    p.poisson = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto res = trace::g2_raw(synth::g2_histogram(p, seed));
        CHECK(res.g2 == doctest::Approx(0.31).epsilon(0.10));
    }
}

TEST_CASE("contact detection over 10 seeds") {
    synth::DispersionScanParams p;
    p.z_step = 20e-9;
    p.n_z = 120;
    p.L_start = 11.5e-6;
    p.dLdz = -1.0;
    p.contact_z = 1570e-9;
    p.lambda_min = 1.25e-6;
    p.lambda_max = 1.45e-6;
    p.n_lambda = 2000;
    p.mode_fwhm = 0.6e-9;
    p.emitter_centers = {1306.2e-9};
    p.emitter_fwhm = 2e-9;
    p.noise_rel = 0.01;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto res = trace::dispersion_analyze(synth::dispersion_scan(p, seed));
        REQUIRE(res.contact_detected);
        CHECK(std::abs(res.z_set[res.contact_index] - 1570e-9) <= 40e-9 + 1e-15);
    }
}
