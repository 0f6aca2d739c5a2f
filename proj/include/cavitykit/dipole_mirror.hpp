#pragma once

#include <string>
#include <vector>

#include "cavitykit/layered_media.hpp"
#include "cavitykit/parallel.hpp"

namespace cavitykit::dipole {

enum class Orientation { parallel, perpendicular, isotropic_average };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

// Relative decay rate gamma/gamma0 of a dipole at distance d from an ideal
// (perfectly conducting) mirror in a host of index n_host, image-dipole
// closed forms with series fallback at small separation.
double pec_enhancement(double distance, double wavelength, double n_host, Orientation o);

struct AngularSpectrumOptions {
    double s_max = 5.0;     // in-plane wavevector cutoff in units of n_host*k0
    double tol = 1e-9;      // quadrature tolerance on the integral value
};

// Relative decay rate near a multilayer mirror via the angular-spectrum
// integral over the mirror's oblique reflection amplitudes. The stack is
// viewed from the emitter side; its incident medium is overridden by n_host.
// Evanescent components are included up to s_max.
double multilayer_enhancement(const layered::LayerStack& mirror, double distance,
                              double wavelength, double n_host, Orientation o,
                              const AngularSpectrumOptions& opt = {});

struct EnhancementCurve {
    std::vector<double> distance;
    std::vector<double> parallel;
    std::vector<double> perpendicular;
    std::vector<double> average;
};

// Enhancement versus distance on a grid, parallelizable over grid points.
EnhancementCurve enhancement_curve(const layered::LayerStack& mirror,
                                   const std::vector<double>& distances, double wavelength,
                                   double n_host, const AngularSpectrumOptions& opt = {},
                                   Exec exec = Exec::parallel);

}  // namespace cavitykit::dipole
