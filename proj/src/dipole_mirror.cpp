#include "cavitykit/dipole_mirror.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "cavitykit/constants.hpp"
#include "cavitykit/quadrature.hpp"

namespace cavitykit::dipole {

using layered::complexd;

std::string to_string(Orientation o) {
    switch (o) {
        case Orientation::parallel: return "parallel";
        case Orientation::perpendicular: return "perpendicular";
        case Orientation::isotropic_average: return "average";
    }
    return "unknown";
}

Orientation orientation_from_string(const std::string& s) {
    if (s == "parallel" || s == "par") return Orientation::parallel;
    if (s == "perpendicular" || s == "perp") return Orientation::perpendicular;
    if (s == "average" || s == "avg" || s == "iso") return Orientation::isotropic_average;
    throw std::invalid_argument("unknown dipole orientation: " + s);
}

namespace {

void check_inputs(double distance, double wavelength, double n_host) {
    if (distance < 0) throw std::invalid_argument("dipole: distance must be >= 0");
    if (!(wavelength > 0) || !(n_host > 0))
        throw std::invalid_argument("dipole: wavelength and n_host must be > 0");
}

double pec_parallel(double a) {
    if (a < 0.1) {
        // image-dipole expression cancels to O(a^2) at contact
        const double a2 = a * a;
        return a2 / 5.0 - 3.0 * a2 * a2 / 280.0;
    }
    const double s = std::sin(a), c = std::cos(a);
    return 1.0 - 1.5 * (s / a + c / (a * a) - s / (a * a * a));
}

double pec_perpendicular(double a) {
    if (a < 0.1) {
        const double a2 = a * a;
        return 2.0 - a2 / 10.0 + a2 * a2 / 280.0;
    }
    const double s = std::sin(a), c = std::cos(a);
    return 1.0 + 3.0 * (s / (a * a * a) - c / (a * a));
}

struct PairPP {
    double par = 0.0;
    double perp = 0.0;
};

// Both angular-spectrum integrals over one pass through the mirror response.
PairPP angular_spectrum(const layered::LayerStack& mirror, double distance, double wavelength,
                        double n_host, const AngularSpectrumOptions& opt) {
    layered::LayerStack stack = mirror;
    stack.incident_medium = complexd{n_host, 0.0};

    const double k = 2.0 * kPi * n_host / wavelength;
    const double lambda_host = wavelength / n_host;

    // propagating part, s = sin(theta) substitution removes the 1/s_z
    // singularity at grazing incidence
    auto perp_prop = [&](double theta) {
        const double s = std::sin(theta), sz = std::cos(theta);
        const auto r = layered::reflection_oblique(stack, wavelength, k * s);
        const complexd phase = std::exp(complexd{0.0, 2.0 * k * distance * sz});
        return s * s * s * std::real(r.rp * phase);
    };
    auto par_prop = [&](double theta) {
        const double s = std::sin(theta), sz = std::cos(theta);
        const auto r = layered::reflection_oblique(stack, wavelength, k * s);
        const complexd phase = std::exp(complexd{0.0, 2.0 * k * distance * sz});
        return s * std::real((r.rs - sz * sz * r.rp) * phase);
    };

    // evanescent part, s = cosh(u) substitution; the exponential factor is a
    // real decay exp(-2 k d sinh u)
    const double u_max = std::acosh(opt.s_max);
    auto perp_evan = [&](double u) {
        const double ch = std::cosh(u), sh = std::sinh(u);
        const auto r = layered::reflection_oblique(stack, wavelength, k * ch);
        return ch * ch * ch * std::imag(r.rp) * std::exp(-2.0 * k * distance * sh);
    };
    auto par_evan = [&](double u) {
        const double ch = std::cosh(u), sh = std::sinh(u);
        const auto r = layered::reflection_oblique(stack, wavelength, k * ch);
        const double bracket = std::imag(r.rs) + (ch * ch - 1.0) * std::imag(r.rp);
        return ch * bracket * std::exp(-2.0 * k * distance * sh);
    };

    PairPP out;
    try {
        const double Ip = adaptive_simpson(perp_prop, 0.0, 0.5 * kPi, opt.tol) +
                          adaptive_simpson(perp_evan, 0.0, u_max, opt.tol);
        const double Il = adaptive_simpson(par_prop, 0.0, 0.5 * kPi, opt.tol) +
                          adaptive_simpson(par_evan, 0.0, u_max, opt.tol);
        out.perp = 1.0 + 1.5 * Ip;
        out.par = 1.0 + 0.75 * Il;
    } catch (const std::runtime_error& e) {
        throw std::runtime_error("multilayer_enhancement at d = " +
                                 std::to_string(distance / lambda_host) +
                                 " host wavelengths: " + e.what());
    }
    return out;
}

}  // namespace

double pec_enhancement(double distance, double wavelength, double n_host, Orientation o) {
    check_inputs(distance, wavelength, n_host);
    const double a = 4.0 * kPi * n_host * distance / wavelength;
    switch (o) {
        case Orientation::parallel: return pec_parallel(a);
        case Orientation::perpendicular: return pec_perpendicular(a);
        case Orientation::isotropic_average:
            return (2.0 * pec_parallel(a) + pec_perpendicular(a)) / 3.0;
    }
    throw std::invalid_argument("pec_enhancement: bad orientation");
}

double multilayer_enhancement(const layered::LayerStack& mirror, double distance,
                              double wavelength, double n_host, Orientation o,
                              const AngularSpectrumOptions& opt) {
    check_inputs(distance, wavelength, n_host);
    if (!(opt.s_max > 1.0))
        throw std::invalid_argument("multilayer_enhancement: s_max must be > 1");
    mirror.validate();
    const PairPP pp = angular_spectrum(mirror, distance, wavelength, n_host, opt);
    switch (o) {
        case Orientation::parallel: return pp.par;
        case Orientation::perpendicular: return pp.perp;
        case Orientation::isotropic_average: return (2.0 * pp.par + pp.perp) / 3.0;
    }
    throw std::invalid_argument("multilayer_enhancement: bad orientation");
}

EnhancementCurve enhancement_curve(const layered::LayerStack& mirror,
                                   const std::vector<double>& distances, double wavelength,
                                   double n_host, const AngularSpectrumOptions& opt, Exec exec) {
    if (distances.empty()) throw std::invalid_argument("enhancement_curve: empty distance grid");
    for (double d : distances) check_inputs(d, wavelength, n_host);
    mirror.validate();
    // exceptions must not escape the worker threads; collect and rethrow
    std::string error;
    auto pts = parallel_map<PairPP>(
        distances.size(),
        [&](std::size_t i) {
            try {
                return angular_spectrum(mirror, distances[i], wavelength, n_host, opt);
            } catch (const std::exception& e) {
#ifdef CAVITYKIT_HAVE_OPENMP
#pragma omp critical
#endif
                error = e.what();
                return PairPP{};
            }
        },
        exec);
    if (!error.empty()) throw std::runtime_error("enhancement_curve: " + error);

    EnhancementCurve curve;
    curve.distance = distances;
    curve.parallel.reserve(pts.size());
    curve.perpendicular.reserve(pts.size());
    curve.average.reserve(pts.size());
    for (const auto& p : pts) {
        curve.parallel.push_back(p.par);
        curve.perpendicular.push_back(p.perp);
        curve.average.push_back((2.0 * p.par + p.perp) / 3.0);
    }
    return curve;
}

}  // namespace cavitykit::dipole
