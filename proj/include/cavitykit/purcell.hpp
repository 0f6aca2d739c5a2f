#pragma once

#include <vector>

#include "cavitykit/core_types.hpp"
#include "cavitykit/parallel.hpp"

namespace cavitykit::purcell {

// Scaled complementary error function exp(x^2) erfc(x) for x >= 0, computed
// without forming the overflowing factors separately.
double erfcx(double x);

// Theoretical emitter-cavity coupling rate, angular units [rad/s]:
//   g0 = sqrt( (gamma/2) 3 lambda^2 c / (n^3 pi^2 w0^2 L_eff) )
// gamma is the lifetime-limited angular rate (EmitterParams::gamma0).
double coupling_rate_g0(const EmitterParams& emitter, const CavityParams& cavity);

enum class OverlapUnits { angular, ordinary, spatial };

// Spectral overlap of the Lorentzian emitter and cavity lines under Gaussian
// length jitter. Linewidths are FWHM in ordinary frequency [Hz]; the result is
// returned in the requested unit system:
//   ordinary: I_nu   = nu0/(sqrt(2 pi) s_nu) exp(S^2/(8 s_nu^2)) erfc(S/(2 sqrt2 s_nu))
//   angular:  I      = 2 pi I_nu
//   spatial:  I_L    = I_nu / (c/(L_eff lambda))
// with S = dnu_cav + dnu_em. At sigma = 0 the perfect-stability value
// 2 nu0 / (pi S) (and unit analogues) is returned.
double overlap_integral(double linewidth_cav, double linewidth_em, const JitterModel& jitter,
                        OverlapUnits units);

struct RegimeRates {
    double full = 0.0;         // [Hz] effective coupling rate R0
    double bad_cavity = 0.0;   // limit 6 lambda^2 F gamma0 / (n^3 pi^3 w0^2)
    double bad_emitter = 0.0;  // limit 3 lambda^2 c gamma0 / (n^3 pi^3 w0^2 L_eff dnu_em)
};

// Effective emitter-cavity coupling rate R0 in ordinary-frequency units [Hz],
// with the bad-cavity / bad-emitter limit formulas for regime diagnostics.
RegimeRates effective_rate_R0(const EmitterParams& emitter, const CavityParams& cavity);

// F_P,ideal = R0 dnu_cav / (gamma0 (R0 + dnu_cav)), xi^2 included via R0.
double purcell_ideal(const EmitterParams& emitter, const CavityParams& cavity);

// F_P,eff with the jitter-broadened coupling rate R_sigma.
double purcell_jittered(const EmitterParams& emitter, const CavityParams& cavity,
                        const JitterModel& jitter);

// F_P,eff = (tau_ref/tau_cav - 1) / eta_QE. A negative result (tau_cav >
// tau_ref) indicates suppression and is flagged, not rejected.
struct DecayPurcell {
    double value = 0.0;
    bool suppression = false;
};
DecayPurcell purcell_from_decay(double tau_ref, double tau_cav, double eta_qe);

struct PurcellCurve {
    std::vector<double> finesse;
    std::vector<double> ideal;             // sigma = 0
    std::vector<double> bad_cavity;        // asymptote
    std::vector<double> bad_emitter;       // asymptote
    std::vector<std::vector<double>> jittered;  // one row per sigma
    std::vector<double> sigmas;            // [m]
    double crossover_finesse = 0.0;        // where dnu_cav(F) = dnu_em
    double two_g0 = 0.0;                   // 2 g0 [rad/s]
};

// Curves over a finesse grid with the cavity template's L_eff/w0/n held fixed.
PurcellCurve purcell_curve(const EmitterParams& emitter, const CavityParams& cavity_template,
                           const std::vector<double>& sigmas,
                           const std::vector<double>& finesse_grid,
                           Exec exec = Exec::parallel);

}  // namespace cavitykit::purcell
