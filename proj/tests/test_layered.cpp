#include <doctest.h>

#include <cmath>
#include <complex>

#include "cavitykit/constants.hpp"
#include "cavitykit/layered_media.hpp"

namespace layered = cavitykit::layered;
using cavitykit::kPi;
using cavitykit::kSpeedOfLight;
using layered::complexd;

namespace {

layered::LayerStack quarter_wave(int pairs, double lam0, double n_hi, double n_lo,
                                 double n_in, double n_out) {
    layered::LayerStack s;
    s.incident_medium = {n_in, 0.0};
    for (int i = 0; i < pairs; ++i) {
        s.layers.push_back({"hi", lam0 / (4.0 * n_hi), {n_hi, 0.0}, false});
        s.layers.push_back({"lo", lam0 / (4.0 * n_lo), {n_lo, 0.0}, false});
    }
    s.exit_medium = {n_out, 0.0};
    return s;
}

}  // namespace

TEST_CASE("half-wave layer is absentee: bare Fresnel interface") {
    layered::LayerStack s;
    s.incident_medium = {1.0, 0.0};
    s.layers.push_back({"hw", 1310e-9 / (2.0 * 2.0), {2.0, 0.0}, false});
    s.exit_medium = {1.5, 0.0};
    const auto resp = layered::solve_stack(s, 1310e-9);
    const double r_fresnel = (1.0 - 1.5) / (1.0 + 1.5);
    CHECK(resp.r.real() == doctest::Approx(r_fresnel).epsilon(1e-10));
    CHECK(std::abs(resp.r.imag()) < 1e-10);
    CHECK(resp.R == doctest::Approx(r_fresnel * r_fresnel).epsilon(1e-10));
}

TEST_CASE("quarter-wave stack reflectance matches the admittance closed form") {
    const double n_in = 1.0, n_hi = 2.21, n_lo = 1.45, n_out = 1.45, lam0 = 1310e-9;
    for (int pairs : {3, 8, 13}) {
        const auto s = quarter_wave(pairs, lam0, n_hi, n_lo, n_in, n_out);
        const auto resp = layered::solve_stack(s, lam0);
        // each H,L pair multiplies the load admittance by (n_hi/n_lo)^2
        const double Y = n_out * std::pow(n_hi / n_lo, 2 * pairs);
        const double R = std::pow((n_in - Y) / (n_in + Y), 2);
        CHECK(resp.R == doctest::Approx(R).epsilon(1e-10));
        // on center, lossless: energy conservation
        CHECK(resp.R + resp.T == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("energy conservation off resonance and with absorption") {
    auto s = quarter_wave(10, 1310e-9, 2.21, 1.45, 1.0, 1.45);
    for (double lam_nm : {1221.7, 1310.0, 1403.9, 1911.3}) {
        const auto resp = layered::solve_stack(s, lam_nm * 1e-9);
        CHECK(resp.R + resp.T == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(resp.A == doctest::Approx(0.0).epsilon(1e-10));
    }
    for (auto& l : s.layers) l.index += complexd(0.0, 1e-4);
    const auto lossy = layered::solve_stack(s, 1310e-9);
    CHECK(lossy.A > 0.0);
    CHECK(lossy.R + lossy.T + lossy.A == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("reflection phase convention: low-to-high interface flips the field") {
    // with exp(-i w t), reflection off an optically denser medium is a pi
    // phase: r real negative
    layered::LayerStack s;
    s.incident_medium = {1.0, 0.0};
    s.layers.push_back({"hw", 1310e-9 / (2.0 * 3.41), {3.41, 0.0}, false});
    s.exit_medium = {3.41, 0.0};
    const auto resp = layered::solve_stack(s, 1310e-9);
    CHECK(resp.r.real() < 0.0);
}

TEST_CASE("oblique amplitudes at normal incidence and at Brewster") {
    layered::LayerStack s;
    s.incident_medium = {1.0, 0.0};
    s.layers.push_back({"slab", 100e-9, {1.5, 0.0}, false});
    s.exit_medium = {1.5, 0.0};
    const double lam = 1310e-9;
    const double k0 = 2.0 * kPi / lam;

    const auto normal = layered::reflection_oblique(s, lam, 0.0);
    const auto on_axis = layered::solve_stack(s, lam);
    CHECK(std::abs(normal.rs - on_axis.r) < 1e-10);
    // r_p carries the opposite sign convention (p -> +1 on a perfect mirror)
    CHECK(std::abs(normal.rp + on_axis.r) < 1e-10);

    // Brewster angle of the 1.0 -> 1.5 interface; the slab front face is index
    // matched to the exit so the whole stack is a single interface
    const double theta_b = std::atan(1.5);
    const auto brewster = layered::reflection_oblique(s, lam, k0 * std::sin(theta_b));
    CHECK(std::abs(brewster.rp) < 1e-10);
    CHECK(std::abs(brewster.rs) > 0.1);
}

TEST_CASE("total internal reflection beyond the critical in-plane wavevector") {
    layered::LayerStack s;
    s.incident_medium = {3.41, 0.0};
    s.layers.push_back({"gap", 5e-6, {1.0, 0.0}, false});
    s.exit_medium = {1.0, 0.0};
    const double lam = 1310e-9;
    const double k0 = 2.0 * kPi / lam;
    const auto r = layered::reflection_oblique(s, lam, 1.5 * k0);  // evanescent in the gap
    CHECK(std::abs(r.rs) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(r.rp) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("field profile is continuous across interfaces") {
    const auto s = quarter_wave(5, 1310e-9, 2.21, 1.45, 1.0, 1.45);
    const auto prof = layered::field_profile(s, 1310e-9, 2e-9);
    REQUIRE(prof.z.size() == prof.intensity.size());
    for (std::size_t i = 1; i < prof.z.size(); ++i) {
        if (prof.z[i] == prof.z[i - 1]) {
            // duplicate sample at an interface: tangential E is continuous
            CHECK(prof.intensity[i] ==
                  doctest::Approx(prof.intensity[i - 1]).epsilon(1e-8));
        }
    }
}

TEST_CASE("effective length integral on a hand-built profile") {
    layered::FieldProfile p;
    p.z = {0.0, 0.5e-6, 1.0e-6};
    p.intensity = {1.0, 1.0, 1.0};
    p.index = {2.0, 2.0, 2.0};
    p.normalization_index = 2.0;
    p.reference_intensity = 1.0;
    CHECK(layered::effective_length(p) == doctest::Approx(2.0e-6).epsilon(1e-12));
    // halving the reference intensity doubles the weight
    p.reference_intensity = 0.5;
    CHECK(layered::effective_length(p) == doctest::Approx(4.0e-6).epsilon(1e-12));
}

TEST_CASE("penetration depth agrees with an independent 5-point group delay") {
    const auto s = quarter_wave(20, 1310e-9, 2.91, 3.41, 3.41, 3.41);
    const double lam = 1310e-9;
    const auto pen = layered::penetration_depth(s, lam);

    const double w0 = 2.0 * kPi * kSpeedOfLight / lam;
    const double h = w0 * 1e-6;
    auto phase = [&](double w) {
        const auto resp = layered::solve_stack(s, 2.0 * kPi * kSpeedOfLight / w);
        return std::arg(resp.r);
    };
    // 5-point stencil, unwrapping not needed near band center
    const double dphi = (phase(w0 - 2 * h) - 8 * phase(w0 - h) + 8 * phase(w0 + h) -
                         phase(w0 + 2 * h)) / (12.0 * h);
    const double oracle = kSpeedOfLight * dphi / 2.0;
    CHECK(pen.length == doctest::Approx(std::abs(oracle)).epsilon(1e-5));
    CHECK(pen.reflectance > 0.99);
    CHECK(pen.warning.empty());
}

TEST_CASE("penetration depth saturates with pair count") {
    double prev = 0.0;
    for (int pairs : {10, 20, 30, 40}) {
        const auto s = quarter_wave(pairs, 1310e-9, 2.91, 3.41, 3.41, 3.41);
        const double d = layered::penetration_depth(s, 1310e-9).length;
        if (pairs > 10) CHECK(std::abs(d - prev) < std::abs(prev) * 0.2);
        prev = d;
    }
    CHECK(prev == doctest::Approx(1.906e-6).epsilon(0.02));
}

TEST_CASE("low-reflectance mirror warns on penetration depth") {
    const auto s = quarter_wave(1, 1310e-9, 1.6, 1.45, 1.0, 1.45);
    const auto pen = layered::penetration_depth(s, 1310e-9);
    CHECK(!pen.warning.empty());
}

TEST_CASE("resonant air gap satisfies the round-trip phase condition") {
    const auto fib = layered::parse_stack(
        "incident_medium = 1.0\n"
        "repeat 13\nlayer hi 148.19 2.21\nlayer lo 225.86 1.45\nend\n"
        "exit_medium = 1.45\n");
    const auto sc = quarter_wave(30, 1310e-9, 2.91, 3.41, 1.0, 3.41);
    const double lam = 1310e-9;
    const double gap = layered::resonant_air_gap(fib, sc, lam, 5.24e-6);
    CHECK(std::abs(gap - 5.24e-6) < lam / 2.0);

    // physical check: build the full cavity with that gap and confirm the
    // transmission sits on a resonance, i.e. drops sharply when detuned
    auto cavity = [&](double L) {
        layered::LayerStack s;
        s.incident_medium = fib.exit_medium;
        for (auto it = fib.layers.rbegin(); it != fib.layers.rend(); ++it) s.layers.push_back(*it);
        s.layers.push_back({"air", L, {1.0, 0.0}, false});
        for (const auto& l : sc.layers) s.layers.push_back(l);
        s.exit_medium = sc.exit_medium;
        return layered::solve_stack(s, lam).T;
    };
    const double on = cavity(gap);
    CHECK(on > 30.0 * cavity(gap - lam / 8.0));
    CHECK(on > 30.0 * cavity(gap + lam / 8.0));
    CHECK(on > cavity(gap - 2e-9));
    CHECK(on > cavity(gap + 2e-9));
}

TEST_CASE("stack parser: repeat groups, ref flag, errors") {
    const auto s = layered::parse_stack(
        "# comment\n"
        "incident_medium = 1.0\n"
        "repeat 3\nlayer a 100 2.0\nlayer b 200 1.5\nend\n"
        "layer mem 489.3 3.41 0 ref\n"
        "exit_medium = 3.41\n");
    REQUIRE(s.layers.size() == 7);
    CHECK(s.layers[6].normalization_ref);
    CHECK(s.layers[6].thickness == doctest::Approx(489.3e-9));
    CHECK(s.layers[2].label == "a");

    CHECK_THROWS(layered::parse_stack("incident_medium = 1.0\nexit_medium = 1.0\n"));
    CHECK_THROWS(layered::parse_stack("layer a 100 2.0\n"));  // missing media
    CHECK_THROWS(layered::parse_stack(
        "incident_medium = 1.0\nrepeat 2\nlayer a 100 2.0\nexit_medium = 1.0\n"));
    CHECK_THROWS(layered::parse_stack(
        "incident_medium = 1.0\nbogus directive\nexit_medium = 1.0\n"));
}
