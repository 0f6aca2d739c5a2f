#pragma once

#include <string>
#include <vector>

namespace cavitykit::efficiency {

enum class Provenance { measured, calculated, manufacturer, inferred };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct Factor {
    std::string name;
    double value = 1.0;  // in [0,1]
    Provenance provenance = Provenance::measured;
};

// Photon-budget chain from excitation to detection; total is the product of
// all factors.
struct EfficiencyChain {
    std::vector<Factor> factors;

    void validate() const;
    double total() const;
};

// beta-factor: F_P / (1 + F_P)
double mode_fraction(double purcell_factor);

// eta_trans = T_fib / L_tot
double mirror_outcoupling(double fib_transmission, double total_loss);

// Mode matching into the fiber mode:
//   4 / ((w_f/w_m + w_m/w_f)^2 + (pi n_f w_f w_m / (lambda RC))^2)
double fiber_mode_match(double w_fiber, double w_mirror, double n_fiber, double wavelength,
                        double radius_of_curvature);

double chain_total(const EfficiencyChain& chain);

// eta_exc = (measured_rate / rep_rate) / chain_without_exc
struct ExcitationEstimate {
    double value = 0.0;
    bool inconsistent = false;  // value > 1: budget does not close
};
ExcitationEstimate infer_excitation(double measured_rate, double rep_rate,
                                    double chain_without_exc);

}  // namespace cavitykit::efficiency
