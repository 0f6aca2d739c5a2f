#include <doctest.h>

#include "cavitykit/constants.hpp"
#include "cavitykit/efficiency.hpp"

namespace eff = cavitykit::efficiency;

TEST_CASE("mode fraction") {
    CHECK(eff::mode_fraction(0.0) == doctest::Approx(0.0));
    CHECK(eff::mode_fraction(1.0) == doctest::Approx(0.5));
    CHECK(eff::mode_fraction(1.54) == doctest::Approx(1.54 / 2.54).epsilon(1e-12));
}

TEST_CASE("mirror outcoupling") {
    CHECK(eff::mirror_outcoupling(1000e-6, 2874e-6) == doctest::Approx(1000.0 / 2874.0));
    CHECK_THROWS(eff::mirror_outcoupling(2000e-6, 1000e-6));  // T > total loss
}

TEST_CASE("fiber mode match limits") {
    const double lam = 1306.2e-9;
    // identical flat-wavefront modes couple perfectly (RC -> infinity)
    CHECK(eff::fiber_mode_match(3e-6, 3e-6, 1.45, lam, 1e6) == doctest::Approx(1.0).epsilon(1e-9));
    // mismatch is symmetric in the two radii
    const double a = eff::fiber_mode_match(4.8e-6, 2.5e-6, 1.45, lam, 34.3e-6);
    const double b = eff::fiber_mode_match(2.5e-6, 4.8e-6, 1.45, lam, 34.3e-6);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(a > 0.0);
    CHECK(a < 1.0);
}

TEST_CASE("chain product and validation") {
    eff::EfficiencyChain chain;
    chain.factors = {{"a", 0.5, eff::Provenance::measured},
                     {"b", 0.4, eff::Provenance::calculated},
                     {"c", 0.25, eff::Provenance::manufacturer}};
    CHECK(eff::chain_total(chain) == doctest::Approx(0.05).epsilon(1e-12));
    chain.factors.push_back({"bad", 1.5, eff::Provenance::measured});
    CHECK_THROWS(eff::chain_total(chain));
}

TEST_CASE("excitation inference and the inconsistency flag") {
    const auto ok = eff::infer_excitation(80e3, 76e6, 0.019);
    CHECK(ok.value == doctest::Approx((80e3 / 76e6) / 0.019).epsilon(1e-12));
    CHECK(!ok.inconsistent);
    const auto bad = eff::infer_excitation(10e6, 76e6, 0.019);
    CHECK(bad.inconsistent);
}

TEST_CASE("provenance strings round trip") {
    for (auto p : {eff::Provenance::measured, eff::Provenance::calculated,
                   eff::Provenance::manufacturer, eff::Provenance::inferred})
        CHECK(eff::provenance_from_string(eff::to_string(p)) == p);
    CHECK_THROWS(eff::provenance_from_string("guessed"));
}
