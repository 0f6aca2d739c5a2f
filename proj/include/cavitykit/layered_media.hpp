#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cavitykit/core_types.hpp"

namespace cavitykit::layered {

using complexd = std::complex<double>;

// Sign conventions: time dependence exp(-i w t), forward propagation
// exp(+i k z). The reflection phase is referenced to the first interface of
// the stack.

struct Layer {
    std::string label;
    double thickness = 0.0;     // [m], > 0
    complexd index{1.0, 0.0};   // Re > 0, Im >= 0 (absorption)
    bool normalization_ref = false;  // marks the field-normalization region

    void validate() const;
};

struct LayerStack {
    complexd incident_medium{1.0, 0.0};
    std::vector<Layer> layers;
    complexd exit_medium{1.0, 0.0};

    void validate() const;
    double total_thickness() const;
    bool lossless() const;
    LayerStack reversed() const;
};

struct AmplitudeResponse {
    double wavelength = 0.0;
    complexd r{};  // reflection amplitude
    complexd t{};  // transmission amplitude
    double R = 0.0, T = 0.0, A = 0.0;
};

struct FieldProfile {
    std::vector<double> z;          // non-decreasing [m]; interfaces carry one sample per side
    std::vector<double> intensity;  // |E(z)|^2 / |E_incident|^2
    std::vector<double> index;      // Re n(z) on the same grid
    double normalization_index = 0.0;     // n_ref for the energy integral
    double reference_intensity = 0.0;     // |E_ref|^2 in the same units as intensity
};

struct PenetrationDepth {
    double length = 0.0;  // c*tau/2 [m]
    double reflectance = 0.0;
    std::string warning;  // non-empty when R < 0.9 or the group delay is ill-conditioned
};

// Amplitudes and energy coefficients of the full stack at normal incidence.
AmplitudeResponse solve_stack(const LayerStack& stack, double wavelength);

// Oblique-incidence reflection amplitudes for both polarizations at in-plane
// wavevector k_par, computed by interface recursion (overflow-safe for
// evanescent waves). Used by the dipole-mirror module.
struct ObliqueReflection {
    complexd rs{};
    complexd rp{};  // convention: r_p -> +1 for a perfect mirror
};
ObliqueReflection reflection_oblique(const LayerStack& stack, double wavelength, double k_par);

// Standing-wave intensity through the stack, including margins of one
// wavelength into the ambient media. grid_step must be <= lambda/(20 max Re n).
FieldProfile field_profile(const LayerStack& stack, double wavelength, double grid_step);

// Sets the normalization of a profile to the intensity maximum inside
// [z_min, z_max], with the given reference index.
void set_normalization(FieldProfile& profile, double z_min, double z_max, double n_ref);

// Effective energy distribution length
//   L_eff = 2 int |E|^2 n^2 / (|E_ref|^2 n_ref^2) dz
// by trapezoidal integration on the profile grid.
double effective_length(const FieldProfile& profile);

// Frequency penetration depth c*tau/2 with tau = d(arg r)/d(omega) evaluated
// by central differences at relative step 1e-5.
PenetrationDepth penetration_depth(const LayerStack& mirror, double wavelength);

// L_opt = L_pen_fib + L_air + L_mem*n_mem + L_pen_sc
double optical_length(const CavityGeometry& geometry);

// Air-gap length of the resonance closest to target_gap, from the reflection
// phases of the two mirrors as seen from the gap.
double resonant_air_gap(const LayerStack& fiber_mirror_from_gap,
                        const LayerStack& sc_mirror_from_gap,
                        double wavelength, double target_gap);

// Stack-definition file, key-value based with repeat groups:
//   incident_medium = <n_real> <n_imag>
//   exit_medium     = <n_real> <n_imag>
//   layer <label> <thickness_nm> <n_real> <n_imag> [ref]
//   repeat <count> ... end
LayerStack load_stack_file(const std::string& path);
LayerStack parse_stack(const std::string& text, const std::string& origin = "<string>");

}  // namespace cavitykit::layered
