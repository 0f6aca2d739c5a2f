#include "cavitykit/cavity_metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cavitykit::metrics {

void MirrorLoss::validate() const {
    if (transmission < 0 || scattering < 0 || absorption < 0)
        throw std::invalid_argument("MirrorLoss: components must be >= 0");
    if (total() >= 1.0) throw std::invalid_argument("MirrorLoss: total must be < 1");
}

double finesse_from_losses(const MirrorLoss& sc, const MirrorLoss& fib) {
    sc.validate();
    fib.validate();
    const double p = (1.0 - sc.total()) * (1.0 - fib.total());
    if (p >= 1.0) throw std::invalid_argument("finesse_from_losses: total loss is zero");
    return kPi * std::pow(p, 0.25) / (1.0 - std::sqrt(p));
}

double total_loss_from_finesse(double finesse) {
    if (!(finesse > 1.0)) throw std::invalid_argument("total_loss_from_finesse: finesse must be > 1");
    auto f_of = [](double per_mirror) {
        MirrorLoss l;
        l.transmission = per_mirror;
        return finesse_from_losses(l, l);
    };
    // finesse is strictly decreasing in the loss; bisect per-mirror loss in [1e-12, 0.5)
    double lo = 1e-12, hi = 0.5 - 1e-12;
    if (f_of(lo) < finesse)
        throw std::runtime_error("total_loss_from_finesse: finesse too large to invert");
    if (f_of(hi) > finesse)
        throw std::runtime_error("total_loss_from_finesse: finesse below invertible range");
    for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f_of(mid) > finesse ? lo : hi) = mid;
    }
    return 2.0 * 0.5 * (lo + hi);
}

double scattering_loss(double S_q, double wavelength) {
    if (S_q < 0) throw std::invalid_argument("scattering_loss: S_q must be >= 0");
    if (!(wavelength > 0)) throw std::invalid_argument("scattering_loss: wavelength must be > 0");
    const double x = 4.0 * kPi * S_q / wavelength;
    return x * x;
}

double impedance_contrast(double fib_trans, double fib_total, double sc_total) {
    if (fib_trans < 0 || fib_trans > fib_total)
        throw std::invalid_argument("impedance_contrast: need 0 <= fib_trans <= fib_total");
    if (sc_total < 0) throw std::invalid_argument("impedance_contrast: sc_total must be >= 0");
    const double denom = fib_total + sc_total;
    if (denom == 0.0) throw std::invalid_argument("impedance_contrast: all losses are zero");
    const double x = (2.0 * fib_trans - fib_total - sc_total) / denom;
    return 1.0 - x * x;
}

double optical_length_from_resonances(double lambda1, double lambda2) {
    if (!(lambda1 > 0) || !(lambda2 > lambda1))
        throw std::invalid_argument("optical_length_from_resonances: need lambda2 > lambda1 > 0");
    return lambda1 * lambda2 / (2.0 * (lambda2 - lambda1));
}

double cavity_linewidth(double finesse, double L_eff) {
    if (!(finesse > 0) || !(L_eff > 0))
        throw std::invalid_argument("cavity_linewidth: finesse and L_eff must be > 0");
    return kSpeedOfLight / (2.0 * L_eff * finesse);
}

double mode_waist(const CavityGeometry& geometry) {
    geometry.validate();
    const double Lg = geometry.geometric_length();
    if (!geometry.stable())
        throw std::invalid_argument("mode_waist: geometry not stable (RC <= L_air + L_mem/n_mem)");
    const double bracket = Lg * geometry.RC_fiber - Lg * Lg;
    return std::sqrt(geometry.wavelength / kPi * std::sqrt(bracket));
}

double mode_radius_on_fiber(const CavityGeometry& geometry) {
    const double w0 = mode_waist(geometry);
    const double Lg = geometry.geometric_length();
    const double zR = kPi * w0 * w0 / geometry.wavelength;
    return w0 * std::sqrt(1.0 + (Lg / zR) * (Lg / zR));
}

}  // namespace cavitykit::metrics
