#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cavitykit/constants.hpp"
#include "cavitykit/dipole_mirror.hpp"
#include "cavitykit/quadrature.hpp"

namespace dipole = cavitykit::dipole;
namespace layered = cavitykit::layered;
using cavitykit::kPi;

namespace {

// Angular-spectrum oracle with the exact perfect-mirror coefficients
// r_s = -1, r_p = +1. Real coefficients kill the evanescent part, so only the
// propagating integral over theta remains.
double oracle_pec_perp(double d, double lam, double n) {
    const double k = 2.0 * kPi * n / lam;
    auto f = [&](double th) {
        const double s = std::sin(th);
        return s * s * s * std::cos(2.0 * k * d * std::cos(th));
    };
    return 1.0 + 1.5 * cavitykit::adaptive_simpson(f, 0.0, 0.5 * kPi, 1e-12);
}

double oracle_pec_par(double d, double lam, double n) {
    const double k = 2.0 * kPi * n / lam;
    auto f = [&](double th) {
        const double s = std::sin(th), c = std::cos(th);
        return s * (1.0 + c * c) * std::cos(2.0 * k * d * c);
    };
    return 1.0 - 0.75 * cavitykit::adaptive_simpson(f, 0.0, 0.5 * kPi, 1e-12);
}

layered::LayerStack metal_mirror(double im_n) {
    layered::LayerStack s;
    s.incident_medium = {3.41, 0.0};
    s.layers.push_back({"metal", 2e-6, {0.2, im_n}, false});
    s.exit_medium = {1.0, 0.0};
    return s;
}

}  // namespace

TEST_CASE("PEC closed forms match the angular-spectrum oracle on a 50-point grid") {
    const double lam = 1310e-9, n = 3.41;
    for (int i = 0; i < 50; ++i) {
        const double d = 1e-9 + i * 16e-9;  // up to ~0.8 um
        CHECK(dipole::pec_enhancement(d, lam, n, dipole::Orientation::perpendicular) ==
              doctest::Approx(oracle_pec_perp(d, lam, n)).epsilon(1e-6));
        CHECK(dipole::pec_enhancement(d, lam, n, dipole::Orientation::parallel) ==
              doctest::Approx(oracle_pec_par(d, lam, n)).epsilon(1e-6));
    }
}

TEST_CASE("contact limits: parallel dipole quenched, perpendicular doubled") {
    const double lam = 1310e-9, n = 3.41;
    CHECK(dipole::pec_enhancement(0.0, lam, n, dipole::Orientation::parallel) ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dipole::pec_enhancement(0.0, lam, n, dipole::Orientation::perpendicular) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("series fallback joins the closed form smoothly") {
    const double lam = 1310e-9, n = 3.41;
    // a = 4 pi n d / lam crosses 0.1 near d = 3.06 nm
    const double d_switch = 0.1 * lam / (4.0 * kPi * n);
    for (auto o : {dipole::Orientation::parallel, dipole::Orientation::perpendicular}) {
        const double below = dipole::pec_enhancement(d_switch * (1.0 - 1e-6), lam, n, o);
        const double above = dipole::pec_enhancement(d_switch * (1.0 + 1e-6), lam, n, o);
        CHECK(below == doctest::Approx(above).epsilon(1e-5));
    }
}

TEST_CASE("isotropic average is the weighted orientation mix") {
    const double lam = 1310e-9, n = 3.41, d = 120e-9;
    const double par = dipole::pec_enhancement(d, lam, n, dipole::Orientation::parallel);
    const double perp = dipole::pec_enhancement(d, lam, n, dipole::Orientation::perpendicular);
    CHECK(dipole::pec_enhancement(d, lam, n, dipole::Orientation::isotropic_average) ==
          doctest::Approx((2.0 * par + perp) / 3.0).epsilon(1e-12));
}

TEST_CASE("oscillations die off as 1/distance over three decades") {
    const double lam = 1310e-9, n = 3.41;
    // envelope amplitude of gamma - 1 scales as 1/a for both orientations
    for (double scale : {1.0, 10.0, 100.0, 1000.0}) {
        const double d = 30e-9 * scale;
        double worst = 0.0;
        for (int i = 0; i < 40; ++i) {
            const double dd = d + i * lam / (4.0 * n * 40.0);
            worst = std::max(worst, std::abs(dipole::pec_enhancement(
                                        dd, lam, n, dipole::Orientation::parallel) - 1.0));
        }
        const double a = 4.0 * kPi * n * d / lam;
        CHECK(worst < 4.0 / a);
        if (scale >= 100.0) CHECK(worst < 0.05);
    }
}

TEST_CASE("multilayer solver approaches PEC as the mirror conductivity grows") {
    const double lam = 1310e-9, n = 3.41;
    // skin depth shifts the effective mirror plane by lam/(2 pi Im n), so the
    // PEC error must shrink as Im n grows
    auto worst_rel = [&](double im_n) {
        const auto mirror = metal_mirror(im_n);
        double worst = 0.0;
        for (double d_nm : {40.0, 100.0, 200.0, 400.0, 800.0}) {
            const double d = d_nm * 1e-9;
            for (auto o : {dipole::Orientation::parallel, dipole::Orientation::perpendicular}) {
                const double got = dipole::multilayer_enhancement(mirror, d, lam, n, o);
                const double want = dipole::pec_enhancement(d, lam, n, o);
                worst = std::max(worst, std::abs(got - want) / std::abs(want));
            }
        }
        return worst;
    };
    const double e12 = worst_rel(12.0), e30 = worst_rel(30.0), e120 = worst_rel(120.0);
    CHECK(e30 < e12);
    CHECK(e120 < e30);

    // with a very good conductor the agreement is tight outside the near field
    const auto mirror = metal_mirror(120.0);
    for (double d_nm : {100.0, 200.0, 400.0, 800.0}) {
        const double d = d_nm * 1e-9;
        for (auto o : {dipole::Orientation::parallel, dipole::Orientation::perpendicular}) {
            const double got = dipole::multilayer_enhancement(mirror, d, lam, n, o);
            const double want = dipole::pec_enhancement(d, lam, n, o);
            CHECK(got == doctest::Approx(want).epsilon(0.05));
        }
    }
}

TEST_CASE("enhancement curve matches pointwise evaluation and averages correctly") {
    layered::LayerStack dbr;
    dbr.incident_medium = {3.41, 0.0};
    for (int i = 0; i < 10; ++i) {
        dbr.layers.push_back({"alas", 112.54e-9, {2.91, 0.0}, false});
        dbr.layers.push_back({"gaas", 96.04e-9, {3.41, 0.0}, false});
    }
    dbr.exit_medium = {3.41, 0.0};
    const std::vector<double> d = {50e-9, 150e-9, 300e-9};
    const auto curve = dipole::enhancement_curve(dbr, d, 1310e-9, 3.41);
    REQUIRE(curve.parallel.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(curve.parallel[i] ==
              doctest::Approx(dipole::multilayer_enhancement(
                                  dbr, d[i], 1310e-9, 3.41, dipole::Orientation::parallel))
                  .epsilon(1e-12));
        CHECK(curve.average[i] ==
              doctest::Approx((2.0 * curve.parallel[i] + curve.perpendicular[i]) / 3.0)
                  .epsilon(1e-12));
    }
}

TEST_CASE("orientation names round trip") {
    for (auto o : {dipole::Orientation::parallel, dipole::Orientation::perpendicular,
                   dipole::Orientation::isotropic_average})
        CHECK(dipole::orientation_from_string(dipole::to_string(o)) == o);
    CHECK(dipole::orientation_from_string("par") == dipole::Orientation::parallel);
    CHECK(dipole::orientation_from_string("perp") == dipole::Orientation::perpendicular);
    CHECK_THROWS(dipole::orientation_from_string("sideways"));
}
