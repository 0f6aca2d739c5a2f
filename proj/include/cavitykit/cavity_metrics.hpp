#pragma once

#include "cavitykit/core_types.hpp"

namespace cavitykit::metrics {

// Per-mirror round-trip losses, stored as dimensionless fractions.
struct MirrorLoss {
    double transmission = 0.0;
    double scattering = 0.0;
    double absorption = 0.0;

    double total() const { return transmission + scattering + absorption; }
    void validate() const;
};

// F = pi ((1-L_sc)(1-L_fib))^(1/4) / (1 - ((1-L_sc)(1-L_fib))^(1/2))
double finesse_from_losses(const MirrorLoss& sc, const MirrorLoss& fib);

// Inverts the finesse relation under a symmetric loss split and returns the
// summed two-mirror loss.
double total_loss_from_finesse(double finesse);

// L_scat = (4 pi S_q / lambda)^2
double scattering_loss(double S_q, double wavelength);

// Resonance-dip contrast from the transmitted loss channel vs all others:
//   C = 1 - (2 L_trans_fib - L_tot_fib - L_tot_sc)^2 / (L_tot_fib + L_tot_sc)^2
double impedance_contrast(double fib_trans, double fib_total, double sc_total);

// L_opt = lambda1 lambda2 / (2 (lambda2 - lambda1)) for consecutive modes.
double optical_length_from_resonances(double lambda1, double lambda2);

// Delta nu_cav = c / (2 L_eff F)
double cavity_linewidth(double finesse, double L_eff);

// Gaussian mode waist in the membrane of the plano-concave cavity:
//   w0^2 = (lambda/pi) sqrt(Lg RC - Lg^2),  Lg = L_air + L_mem/n_mem
double mode_waist(const CavityGeometry& geometry);

// Mode radius on the curved fiber mirror via standard Gaussian propagation:
//   w_m = w0 sqrt(1 + (Lg/zR)^2),  zR = pi w0^2 / lambda
double mode_radius_on_fiber(const CavityGeometry& geometry);

}  // namespace cavitykit::metrics
