#include <doctest.h>

#include <cmath>

#include "cavitykit/quadrature.hpp"

using cavitykit::adaptive_simpson;

TEST_CASE("polynomials up to cubic are exact") {
    auto cubic = [](double x) { return 2.0 * x * x * x - x * x + 3.0 * x - 5.0; };
    // antiderivative: x^4/2 - x^3/3 + 3x^2/2 - 5x
    auto F = [](double x) { return 0.5 * x * x * x * x - x * x * x / 3.0 + 1.5 * x * x - 5.0 * x; };
    const double got = adaptive_simpson(cubic, -1.0, 2.5, 1e-12);
    CHECK(got == doctest::Approx(F(2.5) - F(-1.0)).epsilon(1e-13));
}

TEST_CASE("oscillatory integrand converges to the requested tolerance") {
    auto f = [](double x) { return std::sin(40.0 * x) * std::exp(-x); };
    // exact: int sin(kx) e^-x dx = (k - e^-b (k cos kb + sin kb)) / (1 + k^2) on [0,b]
    const double k = 40.0, b = 3.0;
    const double exact = (k - std::exp(-b) * (k * std::cos(k * b) + std::sin(k * b))) / (1 + k * k);
    CHECK(adaptive_simpson(f, 0.0, b, 1e-11) == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("tightening the tolerance tightens the error") {
    auto f = [](double x) { return 1.0 / (1e-3 + x * x); };
    const double exact = std::atan(1.0 / std::sqrt(1e-3)) / std::sqrt(1e-3) * 2.0;  // [-1,1]
    const double coarse = std::abs(adaptive_simpson(f, -1.0, 1.0, 1e-4) - exact);
    const double fine = std::abs(adaptive_simpson(f, -1.0, 1.0, 1e-10) - exact);
    CHECK(fine <= coarse);
    CHECK(fine < 1e-8);
}

TEST_CASE("depth exhaustion throws") {
    auto f = [](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-300); };
    CHECK_THROWS_AS(adaptive_simpson(f, -1.0, 1.0, 1e-12, 8), std::runtime_error);
}
