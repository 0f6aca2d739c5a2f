#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cavitykit/fitting.hpp"

namespace fitting = cavitykit::fitting;

TEST_CASE("solve_linear against a known system") {
    // A = [[2,1],[1,3]], b = [5,10] -> x = [1,3]
    auto x = fitting::solve_linear({{2, 1}, {1, 3}}, {5, 10});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS(fitting::solve_linear({{1, 2}, {2, 4}}, {1, 2}));
}

TEST_CASE("LM recovers Gaussian parameters from noisy data") {
    const double a = 5.0, c = 0.3, w = 0.1;
    std::vector<double> xs, ys;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int i = 0; i < 200; ++i) {
        const double x = i / 199.0;
        xs.push_back(x);
        ys.push_back(a * std::exp(-0.5 * std::pow((x - c) / w, 2)) + noise(rng));
    }
    auto model = [&](const std::vector<double>& p) {
        std::vector<double> m(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            m[i] = p[0] * std::exp(-0.5 * std::pow((xs[i] - p[1]) / p[2], 2));
        return m;
    };
    const auto fit = fitting::levenberg_marquardt(model, ys, {}, {4.0, 0.4, 0.15});
    REQUIRE(fit.converged);
    CHECK(fit.params[0] == doctest::Approx(a).epsilon(2e-3));
    CHECK(fit.params[1] == doctest::Approx(c).epsilon(1e-3));
    CHECK(fit.params[2] == doctest::Approx(w).epsilon(5e-3));
    // the center should be pinned to a fraction of the width
    CHECK(fit.uncertainties[1] < 0.01 * w * 10);
    CHECK(fit.uncertainties[1] > 0.0);
}

TEST_CASE("LM uncertainties match the analytic linear-fit formula") {
    // straight line y = p0 + p1 x with unit weights: known covariance
    std::vector<double> xs, ys;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> noise(0.0, 0.5);
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        xs.push_back(double(i));
        ys.push_back(2.0 + 0.25 * i + noise(rng));
    }
    auto model = [&](const std::vector<double>& p) {
        std::vector<double> m(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) m[i] = p[0] + p[1] * xs[i];
        return m;
    };
    const auto fit = fitting::levenberg_marquardt(model, ys, {}, {0.0, 0.0});
    REQUIRE(fit.converged);
    double sx = 0, sxx = 0;
    for (double x : xs) {
        sx += x;
        sxx += x * x;
    }
    const double det = n * sxx - sx * sx;
    const double s2 = fit.objective / (n - 2);  // residual variance estimate
    const double sigma_slope = std::sqrt(s2 * n / det);
    CHECK(fit.params[1] == doctest::Approx(0.25).epsilon(0.01));
    CHECK(fit.uncertainties[1] == doctest::Approx(sigma_slope).epsilon(0.05));
}

TEST_CASE("Nelder-Mead minimizes the Rosenbrock function") {
    auto rosen = [](const std::vector<double>& p) {
        const double a = 1.0 - p[0], b = p[1] - p[0] * p[0];
        return a * a + 100.0 * b * b;
    };
    const auto fit = fitting::nelder_mead(rosen, {-1.2, 1.0}, {8000, 1e-14, 0.5});
    CHECK(fit.params[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(fit.params[1] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("curvature uncertainties on an exact quadratic") {
    // f = (x/0.2)^2/2 + (y/3)^2/2 is a unit-sigma NLL with sigmas 0.2 and 3
    auto f = [](const std::vector<double>& p) {
        return 0.5 * std::pow(p[0] / 0.2, 2) + 0.5 * std::pow(p[1] / 3.0, 2);
    };
    const auto H = fitting::numeric_hessian(f, {0.0, 0.0});
    const auto sig = fitting::curvature_uncertainties(H, 1.0);
    CHECK(sig[0] == doctest::Approx(0.2).epsilon(1e-5));
    CHECK(sig[1] == doctest::Approx(3.0).epsilon(1e-5));
}
