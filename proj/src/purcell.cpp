#include "cavitykit/purcell.hpp"

#include <cmath>
#include <stdexcept>

namespace cavitykit::purcell {

namespace {

const double kSqrtPi = std::sqrt(kPi);
const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// xi^2 * 3 lambda^3 / (2 n^3 pi^2 w0^2 L_eff)
double purcell_prefactor(const EmitterParams& em, const CavityParams& cav) {
    const double lam = em.wavelength;
    const double n3 = cav.n_mem * cav.n_mem * cav.n_mem;
    return em.xi * em.xi * 3.0 * lam * lam * lam /
           (2.0 * n3 * kPi * kPi * cav.w0 * cav.w0 * cav.L_eff);
}

double purcell_from_rate(double R, double dnu_cav, double gamma_hz) {
    return R * dnu_cav / (gamma_hz * (R + dnu_cav));
}

}  // namespace

double erfcx(double x) {
    if (x < 0.0) throw std::invalid_argument("erfcx: negative argument not supported");
    if (x < 20.0) {
        // erfc is still far from its underflow threshold here, so the product
        // keeps full relative accuracy
        return std::exp(x * x) * std::erfc(x);
    }
    // asymptotic series 1/(x sqrt(pi)) sum (-1)^k (2k-1)!!/(2x^2)^k
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * kSqrtPi);
}

double coupling_rate_g0(const EmitterParams& emitter, const CavityParams& cavity) {
    emitter.validate();
    cavity.validate();
    const double lam = emitter.wavelength;
    const double n3 = cavity.n_mem * cavity.n_mem * cavity.n_mem;
    const double factor = 3.0 * lam * lam * kSpeedOfLight /
                          (n3 * kPi * kPi * cavity.w0 * cavity.w0 * cavity.L_eff);
    return std::sqrt(0.5 * emitter.gamma0 * factor);
}

double overlap_integral(double linewidth_cav, double linewidth_em, const JitterModel& jitter,
                        OverlapUnits units) {
    if (!(linewidth_cav > 0) || !(linewidth_em > 0))
        throw std::invalid_argument("overlap_integral: linewidths must be > 0");
    jitter.validate();

    const double nu0 = kSpeedOfLight / jitter.wavelength;
    // convert the ordinary-frequency inputs into the requested unit system and
    // evaluate that system's closed form
    double scale = 1.0;       // multiplies frequencies
    double center = nu0;      // nu0 / omega0 / L_eff analogue
    switch (units) {
        case OverlapUnits::ordinary: break;
        case OverlapUnits::angular:
            scale = 2.0 * kPi;
            center = 2.0 * kPi * nu0;
            break;
        case OverlapUnits::spatial:
            scale = 1.0 / jitter.length_to_frequency();
            center = jitter.L_eff;
            break;
    }
    const double S = (linewidth_cav + linewidth_em) * scale;
    const double sigma = jitter.sigma_nu() * scale;
    if (sigma == 0.0) return 2.0 * center / (kPi * S);
    const double u = S / (2.0 * std::sqrt(2.0) * sigma);
    return center / (kSqrt2Pi * sigma) * erfcx(u);
}

RegimeRates effective_rate_R0(const EmitterParams& emitter, const CavityParams& cavity) {
    emitter.validate();
    cavity.validate();
    const double gamma_hz = emitter.gamma0 / (2.0 * kPi);
    const double dnu_cav = cavity.linewidth_cav();
    const double pre = purcell_prefactor(emitter, cavity);
    const double nu0 = kSpeedOfLight / emitter.wavelength;

    RegimeRates rates;
    rates.full = pre * gamma_hz * 2.0 * nu0 / (kPi * (dnu_cav + emitter.linewidth_em));

    const double lam = emitter.wavelength;
    const double n3 = cavity.n_mem * cavity.n_mem * cavity.n_mem;
    const double xi2 = emitter.xi * emitter.xi;
    const double pi3 = kPi * kPi * kPi;
    rates.bad_cavity = xi2 * 6.0 * lam * lam * cavity.finesse * gamma_hz /
                       (n3 * pi3 * cavity.w0 * cavity.w0);
    rates.bad_emitter = xi2 * 3.0 * lam * lam * kSpeedOfLight * gamma_hz /
                        (n3 * pi3 * cavity.w0 * cavity.w0 * cavity.L_eff * emitter.linewidth_em);
    return rates;
}

double purcell_ideal(const EmitterParams& emitter, const CavityParams& cavity) {
    const double R0 = effective_rate_R0(emitter, cavity).full;
    return purcell_from_rate(R0, cavity.linewidth_cav(), emitter.gamma0 / (2.0 * kPi));
}

double purcell_jittered(const EmitterParams& emitter, const CavityParams& cavity,
                        const JitterModel& jitter) {
    emitter.validate();
    cavity.validate();
    JitterModel j{jitter.sigma_L, cavity.L_eff, emitter.wavelength};
    j.validate();
    const double dnu_cav = cavity.linewidth_cav();
    const double gamma_hz = emitter.gamma0 / (2.0 * kPi);
    const double I = overlap_integral(dnu_cav, emitter.linewidth_em, j, OverlapUnits::ordinary);
    const double R = purcell_prefactor(emitter, cavity) * gamma_hz * I;
    return purcell_from_rate(R, dnu_cav, gamma_hz);
}

DecayPurcell purcell_from_decay(double tau_ref, double tau_cav, double eta_qe) {
    if (!(tau_ref > 0) || !(tau_cav > 0))
        throw std::invalid_argument("purcell_from_decay: decay times must be > 0");
    if (!(eta_qe > 0) || eta_qe > 1)
        throw std::invalid_argument("purcell_from_decay: eta_qe must be in (0,1]");
    DecayPurcell out;
    out.value = (tau_ref / tau_cav - 1.0) / eta_qe;
    out.suppression = out.value < 0.0;
    return out;
}

PurcellCurve purcell_curve(const EmitterParams& emitter, const CavityParams& cavity_template,
                           const std::vector<double>& sigmas,
                           const std::vector<double>& finesse_grid, Exec exec) {
    if (finesse_grid.empty()) throw std::invalid_argument("purcell_curve: empty finesse grid");
    emitter.validate();
    cavity_template.validate();

    PurcellCurve curve;
    curve.finesse = finesse_grid;
    curve.sigmas = sigmas;
    curve.crossover_finesse =
        kSpeedOfLight / (2.0 * cavity_template.L_eff * emitter.linewidth_em);
    curve.two_g0 = 2.0 * coupling_rate_g0(emitter, cavity_template);

    struct Point {
        double ideal, bad_cavity, bad_emitter;
        std::vector<double> jittered;
    };
    auto points = parallel_map<Point>(
        finesse_grid.size(),
        [&](std::size_t i) {
            CavityParams cav = cavity_template;
            cav.finesse = finesse_grid[i];
            const double gamma_hz = emitter.gamma0 / (2.0 * kPi);
            Point p;
            p.ideal = purcell_ideal(emitter, cav);
            const auto rates = effective_rate_R0(emitter, cav);
            p.bad_cavity = rates.bad_cavity / gamma_hz;
            p.bad_emitter = rates.bad_emitter / gamma_hz;
            p.jittered.reserve(sigmas.size());
            for (double s : sigmas) {
                JitterModel j{s, cav.L_eff, emitter.wavelength};
                p.jittered.push_back(purcell_jittered(emitter, cav, j));
            }
            return p;
        },
        exec);

    curve.ideal.resize(points.size());
    curve.bad_cavity.resize(points.size());
    curve.bad_emitter.resize(points.size());
    curve.jittered.assign(sigmas.size(), std::vector<double>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        curve.ideal[i] = points[i].ideal;
        curve.bad_cavity[i] = points[i].bad_cavity;
        curve.bad_emitter[i] = points[i].bad_emitter;
        for (std::size_t s = 0; s < sigmas.size(); ++s)
            curve.jittered[s][i] = points[i].jittered[s];
    }
    return curve;
}

}  // namespace cavitykit::purcell
