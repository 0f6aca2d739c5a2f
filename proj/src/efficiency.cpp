#include "cavitykit/efficiency.hpp"

#include <cmath>
#include <stdexcept>

#include "cavitykit/constants.hpp"

namespace cavitykit::efficiency {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::measured: return "measured";
        case Provenance::calculated: return "calculated";
        case Provenance::manufacturer: return "manufacturer";
        case Provenance::inferred: return "inferred";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
    if (s == "measured") return Provenance::measured;
    if (s == "calculated") return Provenance::calculated;
    if (s == "manufacturer") return Provenance::manufacturer;
    if (s == "inferred") return Provenance::inferred;
    throw std::invalid_argument("unknown provenance tag: " + s);
}

void EfficiencyChain::validate() const {
    for (const auto& f : factors)
        if (f.value < 0.0 || f.value > 1.0)
            throw std::invalid_argument("EfficiencyChain: factor '" + f.name +
                                        "' outside [0,1]");
}

double EfficiencyChain::total() const {
    double p = 1.0;
    for (const auto& f : factors) p *= f.value;
    return p;
}

double mode_fraction(double purcell_factor) {
    if (purcell_factor < 0) throw std::invalid_argument("mode_fraction: F_P must be >= 0");
    return purcell_factor / (1.0 + purcell_factor);
}

double mirror_outcoupling(double fib_transmission, double total_loss) {
    if (total_loss == 0.0) throw std::invalid_argument("mirror_outcoupling: total loss is zero");
    if (!(fib_transmission > 0) || fib_transmission > total_loss)
        throw std::invalid_argument("mirror_outcoupling: need 0 < T_fib <= L_tot");
    return fib_transmission / total_loss;
}

double fiber_mode_match(double w_fiber, double w_mirror, double n_fiber, double wavelength,
                        double radius_of_curvature) {
    if (!(w_fiber > 0) || !(w_mirror > 0) || !(n_fiber > 0) || !(wavelength > 0) ||
        !(radius_of_curvature > 0))
        throw std::invalid_argument("fiber_mode_match: all parameters must be > 0");
    const double ratio = w_fiber / w_mirror + w_mirror / w_fiber;
    const double phase = kPi * n_fiber * w_fiber * w_mirror / (wavelength * radius_of_curvature);
    return 4.0 / (ratio * ratio + phase * phase);
}

double chain_total(const EfficiencyChain& chain) {
    chain.validate();
    return chain.total();
}

ExcitationEstimate infer_excitation(double measured_rate, double rep_rate,
                                    double chain_without_exc) {
    if (!(measured_rate > 0) || !(rep_rate > 0))
        throw std::invalid_argument("infer_excitation: rates must be > 0");
    if (!(chain_without_exc > 0))
        throw std::invalid_argument("infer_excitation: chain fraction must be > 0");
    ExcitationEstimate e;
    e.value = (measured_rate / rep_rate) / chain_without_exc;
    e.inconsistent = e.value > 1.0;
    return e;
}

}  // namespace cavitykit::efficiency
