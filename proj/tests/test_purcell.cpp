#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cavitykit/constants.hpp"
#include "cavitykit/purcell.hpp"
#include "cavitykit/quadrature.hpp"

namespace purcell = cavitykit::purcell;
using cavitykit::CavityParams;
using cavitykit::EmitterParams;
using cavitykit::JitterModel;
using cavitykit::kPi;
using cavitykit::kSpeedOfLight;

namespace {

// Brute-force overlap: Gaussian-jittered detuning integral over the numeric
// frequency overlap of the two Lorentzian lines. The inner integral is mapped
// to a finite interval with nu = M tan(u) so the 1/nu^2 tails are exact.
double overlap_oracle(double nu0, double lw_cav, double lw_em, double sigma_nu) {
    auto lor = [](double nu, double fwhm) {
        const double hw = 0.5 * fwhm;
        return hw / (kPi * (nu * nu + hw * hw));
    };
    const double S = lw_cav + lw_em;
    auto inner = [&](double delta_signed) {
        // both Lorentzians are even, so the overlap only depends on |delta|;
        // folding keeps the peak ordering fixed for the split below
        const double delta = std::abs(delta_signed);
        // the integrand has a peak of width lw_em at nu = 0 and one of width
        // lw_cav at nu = delta; split at the midpoint and give each side a tan
        // substitution centered on its own peak so both are O(1) wide
        auto prod = [&](double nu) { return lor(nu - delta, lw_cav) * lor(nu, lw_em); };
        const double mid = 0.5 * delta;
        auto em_side = [&](double u) {
            const double c = std::cos(u);
            return prod(lw_em * std::tan(u)) * lw_em / (c * c);
        };
        auto cav_side = [&](double u) {
            const double c = std::cos(u);
            return prod(delta + lw_cav * std::tan(u)) * lw_cav / (c * c);
        };
        // the result is of order lor(delta, S); keep the error relative to
        // that so the outer quadrature never sees inner-quadrature noise
        const double tol = 0.5e-10 * lor(delta, S);
        return cavitykit::adaptive_simpson(em_side, -0.5 * kPi + 1e-12, std::atan(mid / lw_em),
                                           tol) +
               cavitykit::adaptive_simpson(cav_side, std::atan((mid - delta) / lw_cav),
                                           0.5 * kPi - 1e-12, tol);
    };
    if (sigma_nu == 0.0) return nu0 * inner(0.0);
    auto outer = [&](double delta) {
        const double gauss = std::exp(-0.5 * std::pow(delta / sigma_nu, 2)) /
                             (std::sqrt(2.0 * kPi) * sigma_nu);
        return gauss * inner(delta);
    };
    // delta = W tan(v) puts both the Gaussian and the Lorentzian overlap
    // profile at O(1) width in v, whichever is narrower
    const double W = std::min(sigma_nu, S);
    auto outer_v = [&](double v) {
        const double c = std::cos(v);
        return outer(W * std::tan(v)) * W / (c * c);
    };
    // the integral is roughly peak value times the narrower of the two widths
    const double scale = inner(0.0) / (std::sqrt(2.0 * kPi) * sigma_nu) * W;
    // beyond 10 (sigma + S) the Gaussian weight is < exp(-50); cutting there
    // keeps the inner spike resolvable at every sampled detuning
    const double v_max = std::atan(10.0 * (sigma_nu + S) / W);
    // the outer tolerance must sit well above the inner quadrature noise
    return nu0 * cavitykit::adaptive_simpson(outer_v, -v_max, v_max, 1e-8 * scale);
}

}  // namespace

TEST_CASE("erfcx basics and asymptotics") {
    CHECK(purcell::erfcx(0.0) == doctest::Approx(1.0).epsilon(1e-15));
    for (double x : {0.1, 0.5, 1.0, 3.0, 8.0, 20.0}) {
        CHECK(purcell::erfcx(x) * std::exp(-x * x) == doctest::Approx(std::erfc(x)).epsilon(1e-12));
    }
    // large-argument series: erfcx(x) ~ 1/(x sqrt(pi)) (1 - 1/(2x^2) + 3/(4x^4))
    for (double x : {30.0, 100.0, 1e4}) {
        const double s = 1.0 / (x * std::sqrt(kPi)) *
                         (1.0 - 0.5 / (x * x) + 0.75 / (x * x * x * x));
        CHECK(purcell::erfcx(x) == doctest::Approx(s).epsilon(1e-9));
    }
    // continuity across the series switchover
    CHECK(purcell::erfcx(20.0 - 1e-9) == doctest::Approx(purcell::erfcx(20.0 + 1e-9)).epsilon(1e-6));
}

TEST_CASE("jittered overlap matches the double-quadrature oracle on 100 triples") {
    const double L_eff = 7.25e-6, lam = 1310e-9;
    const double nu0 = kSpeedOfLight / lam;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int checked = 0;
    // stratified: 5 cavity-linewidth decades x 4 emitter decades x 5 jitter
    // ratios = 100 triples
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 5; ++k) {
                const double lw_cav = std::pow(10.0, 8.0 + (i + uni(rng)) * 0.6);
                const double lw_em = std::pow(10.0, 8.5 + (j + uni(rng)) * 0.5);
                const double ratio = std::pow(10.0, -2.0 + (k + uni(rng)) * 0.8);
                const double sigma_nu = ratio * (lw_cav + lw_em);

                JitterModel jit;
                jit.L_eff = L_eff;
                jit.wavelength = lam;
                jit.sigma_L = sigma_nu / jit.length_to_frequency();
                const double got =
                    purcell::overlap_integral(lw_cav, lw_em, jit, purcell::OverlapUnits::ordinary);
                const double want = overlap_oracle(nu0, lw_cav, lw_em, sigma_nu);
                CHECK(got == doctest::Approx(want).epsilon(1e-6));
                ++checked;
            }
    CHECK(checked == 100);
}

TEST_CASE("sigma = 0 overlap equals the perfect-stability closed form") {
    JitterModel jit;
    jit.L_eff = 7.25e-6;
    jit.wavelength = 1306.2e-9;
    jit.sigma_L = 0.0;
    const double lw_cav = 12.2e9, lw_em = 7.4e9;
    const double nu0 = kSpeedOfLight / jit.wavelength;
    const double want = 2.0 * nu0 / (kPi * (lw_cav + lw_em));
    const double got = purcell::overlap_integral(lw_cav, lw_em, jit, purcell::OverlapUnits::ordinary);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("jittered Purcell factor reduces to the ideal one at sigma = 0") {
    EmitterParams em;
    em.gamma0 = 1.0 / 1.007e-9;
    em.linewidth_em = 7.4e9;
    em.wavelength = 1306.2e-9;
    CavityParams cav;
    cav.finesse = 1788.0;
    cav.L_eff = 7.25e-6;
    cav.w0 = 2.28e-6;
    cav.n_mem = 3.41;
    JitterModel jit;
    jit.L_eff = cav.L_eff;
    jit.wavelength = em.wavelength;
    jit.sigma_L = 0.0;
    CHECK(purcell::purcell_jittered(em, cav, jit) ==
          doctest::Approx(purcell::purcell_ideal(em, cav)).epsilon(1e-14));
}

TEST_CASE("regime limits at linewidth ratio 100") {
    EmitterParams em;
    em.gamma0 = 1e9;
    em.wavelength = 1310e-9;
    CavityParams cav;
    cav.L_eff = 7.25e-6;
    cav.w0 = 2.28e-6;
    cav.n_mem = 3.41;

    // bad cavity: cavity line 100x wider than the emitter
    cav.finesse = 500.0;
    em.linewidth_em = cav.linewidth_cav() / 100.0;
    auto rates = purcell::effective_rate_R0(em, cav);
    CHECK(rates.full == doctest::Approx(rates.bad_cavity).epsilon(0.011));

    // bad emitter: emitter line 100x wider than the cavity
    em.linewidth_em = cav.linewidth_cav() * 100.0;
    rates = purcell::effective_rate_R0(em, cav);
    CHECK(rates.full == doctest::Approx(rates.bad_emitter).epsilon(0.011));
}

TEST_CASE("dipole overlap and quantum efficiency enter as expected") {
    EmitterParams em;
    em.gamma0 = 1e9;
    em.linewidth_em = 7.4e9;
    em.wavelength = 1310e-9;
    CavityParams cav;
    cav.finesse = 1788.0;
    cav.L_eff = 7.25e-6;
    cav.w0 = 2.28e-6;
    cav.n_mem = 3.41;

    const double base = purcell::effective_rate_R0(em, cav).full;
    em.xi = 0.5;
    CHECK(purcell::effective_rate_R0(em, cav).full == doctest::Approx(0.25 * base).epsilon(1e-12));
}

TEST_CASE("decay-derived Purcell factor and the suppression flag") {
    const auto r = purcell::purcell_from_decay(1.007e-9, 0.409e-9, 0.95);
    CHECK(r.value == doctest::Approx((1.007 / 0.409 - 1.0) / 0.95).epsilon(1e-12));
    CHECK(!r.suppression);
    const auto s = purcell::purcell_from_decay(0.5e-9, 0.6e-9, 1.0);
    CHECK(s.suppression);
    CHECK(s.value < 0.0);
}

TEST_CASE("Purcell curve: jitter only hurts, crossover at linewidth equality") {
    EmitterParams em;
    em.gamma0 = 1.0 / 1.007e-9;
    em.linewidth_em = 7.4e9;
    em.wavelength = 1306.2e-9;
    CavityParams cav;
    cav.finesse = 1788.0;
    cav.L_eff = 7.25e-6;
    cav.w0 = 2.28e-6;
    cav.n_mem = 3.41;
    std::vector<double> grid;
    for (int i = 0; i < 60; ++i) grid.push_back(100.0 * std::pow(10.0, i / 20.0));
    const auto curve = purcell::purcell_curve(em, cav, {56e-12, 850e-12}, grid);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(curve.jittered[0][i] <= curve.ideal[i] * (1.0 + 1e-12));
        CHECK(curve.jittered[1][i] <= curve.jittered[0][i] * (1.0 + 1e-12));
    }
    CavityParams at_cross = cav;
    at_cross.finesse = curve.crossover_finesse;
    CHECK(at_cross.linewidth_cav() == doctest::Approx(em.linewidth_em).epsilon(1e-9));
    CHECK(curve.two_g0 == doctest::Approx(2.0 * purcell::coupling_rate_g0(em, cav)).epsilon(1e-12));
}
