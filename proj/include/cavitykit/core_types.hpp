#pragma once

#include <stdexcept>

#include "cavitykit/constants.hpp"

namespace cavitykit {

// Plano-concave cavity geometry. All lengths in meters.
struct CavityGeometry {
    double L_air = 0.0;      // air gap
    double L_mem = 0.0;      // membrane thickness
    double n_mem = 1.0;      // membrane refractive index
    double RC_fiber = 0.0;   // radius of curvature of the fiber mirror
    double wavelength = 0.0;
    double L_pen_fib = 0.0;  // frequency penetration depth, fiber mirror
    double L_pen_sc = 0.0;   // frequency penetration depth, semiconductor mirror
    double L_eff = 0.0;      // effective energy distribution length

    // Geometric one-way length of the Gaussian mode.
    double geometric_length() const { return L_air + L_mem / n_mem; }

    bool stable() const { return RC_fiber > geometric_length(); }

    void validate() const {
        if (L_air < 0 || L_mem < 0 || L_pen_fib < 0 || L_pen_sc < 0 || L_eff < 0)
            throw std::invalid_argument("CavityGeometry: lengths must be non-negative");
        if (n_mem <= 0) throw std::invalid_argument("CavityGeometry: n_mem must be > 0");
    }
};

// Emitter description. gamma0 is the free-space emission rate in angular
// units [rad/s]; linewidth_em is the FWHM in ordinary frequency [Hz].
struct EmitterParams {
    double gamma0 = 0.0;
    double linewidth_em = 0.0;
    double wavelength = 0.0;
    double eta_qe = 1.0;  // quantum efficiency
    double xi = 1.0;      // dipole overlap, xi^2 <= 1

    void validate() const {
        if (gamma0 <= 0) throw std::invalid_argument("EmitterParams: gamma0 must be > 0");
        if (linewidth_em <= 0) throw std::invalid_argument("EmitterParams: linewidth_em must be > 0");
        if (wavelength <= 0) throw std::invalid_argument("EmitterParams: wavelength must be > 0");
        if (eta_qe <= 0 || eta_qe > 1) throw std::invalid_argument("EmitterParams: eta_qe must be in (0,1]");
        if (xi < 0 || xi > 1) throw std::invalid_argument("EmitterParams: xi must be in [0,1]");
    }
};

struct CavityParams {
    double finesse = 0.0;
    double L_eff = 0.0;
    double w0 = 0.0;     // mode waist in the membrane
    double n_mem = 1.0;

    double linewidth_cav() const { return kSpeedOfLight / (2.0 * L_eff * finesse); }

    void validate() const {
        if (finesse <= 1) throw std::invalid_argument("CavityParams: finesse must be > 1");
        if (L_eff <= 0 || w0 <= 0) throw std::invalid_argument("CavityParams: lengths must be > 0");
        if (n_mem <= 0) throw std::invalid_argument("CavityParams: n_mem must be > 0");
    }
};

// Rms cavity-length jitter with its frequency equivalents. The conversion
// scale is sigma_nu = sigma_L * c / (L_eff * lambda).
struct JitterModel {
    double sigma_L = 0.0;     // [m]
    double L_eff = 0.0;       // [m], conversion context
    double wavelength = 0.0;  // [m], conversion context

    double length_to_frequency() const { return kSpeedOfLight / (L_eff * wavelength); }
    double sigma_nu() const { return sigma_L * length_to_frequency(); }
    double sigma_omega() const { return 2.0 * kPi * sigma_nu(); }

    void validate() const {
        if (sigma_L < 0) throw std::invalid_argument("JitterModel: sigma_L must be >= 0");
        if (L_eff <= 0 || wavelength <= 0)
            throw std::invalid_argument("JitterModel: L_eff and wavelength must be > 0");
    }
};

}  // namespace cavitykit
