// cavitykit command-line front end: transfer-matrix simulation, cavity
// metrics, Purcell factors, efficiency budgets, measurement analysis,
// synthetic data and end-to-end reproduction pipelines.

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cavitykit/cavity_metrics.hpp"
#include "cavitykit/config.hpp"
#include "cavitykit/constants.hpp"
#include "cavitykit/csvio.hpp"
#include "cavitykit/dipole_mirror.hpp"
#include "cavitykit/efficiency.hpp"
#include "cavitykit/layered_media.hpp"
#include "cavitykit/parallel.hpp"
#include "cavitykit/purcell.hpp"
#include "cavitykit/report.hpp"
#include "cavitykit/synth.hpp"
#include "cavitykit/trace_analysis.hpp"

namespace ck = cavitykit;
using ck::config::Config;
using ck::config::Dim;
using nlohmann::json;

namespace {

std::string out_dir() {
    const char* env = std::getenv("CAVITYKIT_OUTDIR");
    return env && *env ? env : ".";
}

std::string out_path(const std::string& user, const std::string& fallback) {
    if (!user.empty()) return user;
    return out_dir() + "/" + fallback;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::istringstream in(text);
    double x;
    while (in >> x) v.push_back(x);
    if (!in.eof()) throw std::invalid_argument("expected a space-separated number list: " + text);
    return v;
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw std::invalid_argument("bad grid specification");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

std::vector<double> lin_grid(double lo, double hi, int n) {
    if (!(hi > lo) || n < 2) throw std::invalid_argument("bad grid specification");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return g;
}

ck::EmitterParams emitter_from_config(const Config& cfg) {
    ck::EmitterParams em;
    if (const auto tau = cfg.quantity_opt("emitter_tau0", Dim::time))
        em.gamma0 = 1.0 / *tau;
    else
        em.gamma0 = cfg.quantity("emitter_gamma0", Dim::rate);
    em.linewidth_em = cfg.quantity("emitter_linewidth", Dim::frequency);
    em.wavelength = cfg.quantity("emitter_wavelength", Dim::length);
    em.eta_qe = cfg.number_opt("emitter_eta_qe").value_or(1.0);
    em.xi = cfg.number_opt("emitter_xi").value_or(1.0);
    em.validate();
    return em;
}

ck::CavityParams cavity_from_config(const Config& cfg) {
    ck::CavityParams cav;
    cav.finesse = cfg.number("cavity_finesse");
    cav.L_eff = cfg.quantity("cavity_L_eff", Dim::length);
    cav.w0 = cfg.quantity("cavity_w0", Dim::length);
    cav.n_mem = cfg.number("cavity_n_mem");
    cav.validate();
    return cav;
}

// ------------------------------------------------------------------- tmm

struct TmmArgs {
    std::string stack, output;
    double wavelength_nm = 1310.0;
    double min_nm = 1200.0, max_nm = 1400.0;
    int points = 801;
    double step_nm = 0.0;
    ck::Exec exec = ck::Exec::parallel;
};

void run_tmm_spectrum(const TmmArgs& a) {
    const auto stack = ck::layered::load_stack_file(a.stack);
    const auto grid = lin_grid(a.min_nm, a.max_nm, a.points);
    const auto resp = ck::parallel_map<ck::layered::AmplitudeResponse>(
        grid.size(), [&](std::size_t i) { return ck::layered::solve_stack(stack, grid[i] * 1e-9); },
        a.exec);
    std::vector<double> R(grid.size()), T(grid.size()), A(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        R[i] = resp[i].R;
        T[i] = resp[i].T;
        A[i] = resp[i].A;
    }
    ck::csvio::write_table(out_path(a.output, "tmm_spectrum.csv"),
                           "wavelength_nm,reflectance,transmittance,absorptance",
                           {grid, R, T, A});
}

void run_tmm_field(const TmmArgs& a) {
    const auto stack = ck::layered::load_stack_file(a.stack);
    const double lam = a.wavelength_nm * 1e-9;
    const double step = (a.step_nm > 0 ? a.step_nm : 1.0) * 1e-9;
    const auto prof = ck::layered::field_profile(stack, lam, step);
    std::vector<double> z_nm(prof.z.size());
    for (std::size_t i = 0; i < z_nm.size(); ++i) z_nm[i] = prof.z[i] * 1e9;
    ck::csvio::write_table(out_path(a.output, "tmm_field.csv"), "z_nm,intensity,index",
                           {z_nm, prof.intensity, prof.index});
}

// normalization window of the layer flagged ref in the stack file
void apply_ref_normalization(const ck::layered::LayerStack& stack,
                             ck::layered::FieldProfile& prof, double wavelength) {
    double z0 = wavelength;  // profile includes a one-wavelength ambient margin
    for (const auto& layer : stack.layers) {
        if (layer.normalization_ref) {
            ck::layered::set_normalization(prof, z0, z0 + layer.thickness,
                                           layer.index.real());
            return;
        }
        z0 += layer.thickness;
    }
    throw std::invalid_argument("stack has no layer marked 'ref' for normalization");
}

void run_tmm_leff(const TmmArgs& a) {
    const auto stack = ck::layered::load_stack_file(a.stack);
    const double lam = a.wavelength_nm * 1e-9;
    const double step = (a.step_nm > 0 ? a.step_nm : 0.5) * 1e-9;
    auto prof = ck::layered::field_profile(stack, lam, step);
    apply_ref_normalization(stack, prof, lam);
    const double leff = ck::layered::effective_length(prof);

    auto rep = ck::report::make_report("tmm leff");
    ck::report::add_input(rep, a.stack);
    ck::report::add_result(rep, "L_eff", leff * 1e6, "um",
                           "L_eff = 2 int |E|^2 n^2 / (|E_ref|^2 n_ref^2) dz");
    ck::report::write(rep, out_path(a.output, "tmm_leff.json"));
}

void run_tmm_penetration(const TmmArgs& a) {
    const auto stack = ck::layered::load_stack_file(a.stack);
    const auto pen = ck::layered::penetration_depth(stack, a.wavelength_nm * 1e-9);
    auto rep = ck::report::make_report("tmm penetration");
    ck::report::add_input(rep, a.stack);
    ck::report::add_result(rep, "L_pen", pen.length * 1e6, "um",
                           "L_pen = c tau / 2, tau = d(arg r)/d(omega)");
    ck::report::add_result(rep, "reflectance", pen.reflectance, "", "|r|^2");
    if (!pen.warning.empty()) rep["warning"] = pen.warning;
    ck::report::write(rep, out_path(a.output, "tmm_penetration.json"));
}

// --------------------------------------------------------------- metrics

struct MetricsArgs {
    std::string config, output;
};

ck::metrics::MirrorLoss loss_from_config(const Config& cfg, const std::string& side) {
    ck::metrics::MirrorLoss l;
    l.transmission = cfg.quantity(side + "_transmission", Dim::dimensionless);
    l.scattering = cfg.quantity_opt(side + "_scattering", Dim::dimensionless).value_or(0.0);
    l.absorption = cfg.quantity_opt(side + "_absorption", Dim::dimensionless).value_or(0.0);
    l.validate();
    return l;
}

void run_metrics_finesse(const MetricsArgs& a) {
    const auto cfg = Config::load(a.config);
    auto rep = ck::report::make_report("metrics finesse");
    ck::report::add_input(rep, a.config);
    if (cfg.has("finesse")) {
        const double f = cfg.number("finesse");
        ck::report::add_result(rep, "total_loss", ck::to_ppm(ck::metrics::total_loss_from_finesse(f)),
                               "ppm", "inverse of F(L) under a symmetric split");
    } else {
        const auto sc = loss_from_config(cfg, "sc");
        const auto fib = loss_from_config(cfg, "fib");
        ck::report::add_result(
            rep, "finesse", ck::metrics::finesse_from_losses(sc, fib), "",
            "F = pi ((1-Lsc)(1-Lfib))^(1/4) / (1 - ((1-Lsc)(1-Lfib))^(1/2))");
        ck::report::add_result(rep, "total_loss", ck::to_ppm(sc.total() + fib.total()), "ppm",
                               "sum of all mirror loss channels");
    }
    cfg.finish();
    ck::report::write(rep, out_path(a.output, "metrics_finesse.json"));
}

void run_metrics_contrast(const MetricsArgs& a) {
    const auto cfg = Config::load(a.config);
    const double ft = cfg.quantity("fib_transmission", Dim::dimensionless);
    const double fl = cfg.quantity("fib_total", Dim::dimensionless);
    const double sl = cfg.quantity("sc_total", Dim::dimensionless);
    cfg.finish();
    auto rep = ck::report::make_report("metrics contrast");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "contrast", ck::metrics::impedance_contrast(ft, fl, sl), "",
                           "C = 1 - (2 Ltrans - Lfib - Lsc)^2 / (Lfib + Lsc)^2");
    ck::report::write(rep, out_path(a.output, "metrics_contrast.json"));
}

void run_metrics_scatter(const MetricsArgs& a) {
    const auto cfg = Config::load(a.config);
    const double sq = cfg.quantity("roughness", Dim::length);
    const double lam = cfg.quantity("wavelength", Dim::length);
    cfg.finish();
    auto rep = ck::report::make_report("metrics scatter");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "scattering_loss", ck::to_ppm(ck::metrics::scattering_loss(sq, lam)),
                           "ppm", "L_scat = (4 pi S_q / lambda)^2");
    ck::report::write(rep, out_path(a.output, "metrics_scatter.json"));
}

void run_metrics_geometry(const MetricsArgs& a) {
    const auto cfg = Config::load(a.config);
    ck::CavityGeometry g;
    g.L_air = cfg.quantity("L_air", Dim::length);
    g.L_mem = cfg.quantity_opt("L_mem", Dim::length).value_or(0.0);
    g.n_mem = cfg.number_opt("n_mem").value_or(1.0);
    g.RC_fiber = cfg.quantity("RC_fiber", Dim::length);
    g.wavelength = cfg.quantity("wavelength", Dim::length);
    g.L_pen_fib = cfg.quantity_opt("L_pen_fib", Dim::length).value_or(0.0);
    g.L_pen_sc = cfg.quantity_opt("L_pen_sc", Dim::length).value_or(0.0);
    cfg.finish();
    g.validate();

    auto rep = ck::report::make_report("metrics geometry");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "w0", ck::metrics::mode_waist(g) * 1e6, "um",
                           "w0^2 = (lambda/pi) sqrt(Lg RC - Lg^2)");
    ck::report::add_result(rep, "w_m", ck::metrics::mode_radius_on_fiber(g) * 1e6, "um",
                           "w_m = w0 sqrt(1 + (Lg/zR)^2)");
    if (g.L_pen_fib > 0 || g.L_pen_sc > 0)
        ck::report::add_result(rep, "L_opt", ck::layered::optical_length(g) * 1e6, "um",
                               "L_opt = L_pen_fib + L_air + n L_mem + L_pen_sc");
    ck::report::write(rep, out_path(a.output, "metrics_geometry.json"));
}

// --------------------------------------------------------------- purcell

struct PurcellArgs {
    std::string config, output;
    ck::Exec exec = ck::Exec::parallel;
};

void run_purcell_ideal(const PurcellArgs& a) {
    const auto cfg = Config::load(a.config);
    const auto em = emitter_from_config(cfg);
    const auto cav = cavity_from_config(cfg);
    // emitter files shared with the jitter subcommand may carry a sigma
    cfg.quantity_opt("jitter_sigma", Dim::length);
    cfg.finish();
    const auto rates = ck::purcell::effective_rate_R0(em, cav);
    auto rep = ck::report::make_report("purcell ideal");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "F_P_ideal", ck::purcell::purcell_ideal(em, cav), "",
                           "F = R0 dnu_cav / (gamma (R0 + dnu_cav))");
    ck::report::add_result(rep, "R0", rates.full, "Hz",
                           "R0 = pre * gamma * 2 nu0 / (pi (dnu_cav + dnu_em))");
    ck::report::add_result(rep, "R0_bad_cavity", rates.bad_cavity, "Hz",
                           "6 lambda^2 F gamma / (n^3 pi^3 w0^2)");
    ck::report::add_result(rep, "R0_bad_emitter", rates.bad_emitter, "Hz",
                           "3 lambda^2 c gamma / (n^3 pi^3 w0^2 L_eff dnu_em)");
    ck::report::add_result(rep, "g0_over_2pi", ck::purcell::coupling_rate_g0(em, cav) /
                                                  (2.0 * ck::kPi) / 1e9,
                           "GHz", "g0 = sqrt(gamma/2 * 3 lambda^2 c / (n^3 pi^2 w0^2 L_eff))");
    ck::report::add_result(rep, "dnu_cav", cav.linewidth_cav() / 1e9, "GHz",
                           "dnu_cav = c / (2 L_eff F)");
    ck::report::write(rep, out_path(a.output, "purcell_ideal.json"));
}

void run_purcell_jitter(const PurcellArgs& a) {
    const auto cfg = Config::load(a.config);
    const auto em = emitter_from_config(cfg);
    const auto cav = cavity_from_config(cfg);
    ck::JitterModel jit{cfg.quantity("jitter_sigma", Dim::length), cav.L_eff, em.wavelength};
    cfg.finish();
    auto rep = ck::report::make_report("purcell jitter");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "F_P_eff", ck::purcell::purcell_jittered(em, cav, jit), "",
                           "F = R_sigma dnu_cav / (gamma (R_sigma + dnu_cav))");
    ck::report::add_result(rep, "F_P_ideal", ck::purcell::purcell_ideal(em, cav), "",
                           "sigma = 0 limit");
    ck::report::add_result(rep, "sigma_nu", jit.sigma_nu() / 1e9, "GHz",
                           "sigma_nu = sigma c / (L_eff lambda)");
    ck::report::write(rep, out_path(a.output, "purcell_jitter.json"));
}

void write_purcell_curve(const ck::EmitterParams& em, const ck::CavityParams& cav,
                         const std::vector<double>& sigmas, const std::vector<double>& grid,
                         ck::Exec exec, const std::string& path) {
    const auto curve = ck::purcell::purcell_curve(em, cav, sigmas, grid, exec);
    std::string header = "finesse,fp_ideal,fp_bad_cavity,fp_bad_emitter";
    std::vector<std::vector<double>> cols = {curve.finesse, curve.ideal, curve.bad_cavity,
                                             curve.bad_emitter};
    for (std::size_t s = 0; s < sigmas.size(); ++s) {
        header += ",fp_sigma_" + ck::csvio::format_number(sigmas[s] * 1e12) + "pm";
        cols.push_back(curve.jittered[s]);
    }
    ck::csvio::write_table(path, header, cols);
}

void run_purcell_curve(const PurcellArgs& a) {
    const auto cfg = Config::load(a.config);
    const auto em = emitter_from_config(cfg);
    const auto cav = cavity_from_config(cfg);
    std::vector<double> sigmas;
    for (double pm : parse_list(cfg.text_opt("sigma_list_pm").value_or("0")))
        sigmas.push_back(pm * 1e-12);
    const double lo = cfg.number_opt("finesse_min").value_or(100.0);
    const double hi = cfg.number_opt("finesse_max").value_or(30000.0);
    const int n = static_cast<int>(cfg.number_opt("finesse_points").value_or(200));
    cfg.finish();
    write_purcell_curve(em, cav, sigmas, log_grid(lo, hi, n), a.exec,
                        out_path(a.output, "purcell_curve.csv"));
}

void run_purcell_from_decay(const PurcellArgs& a) {
    const auto cfg = Config::load(a.config);
    const double tref = cfg.quantity("tau_ref", Dim::time);
    const double tcav = cfg.quantity("tau_cav", Dim::time);
    const double qe = cfg.number_opt("eta_qe").value_or(1.0);
    cfg.finish();
    const auto r = ck::purcell::purcell_from_decay(tref, tcav, qe);
    auto rep = ck::report::make_report("purcell from-decay");
    ck::report::add_input(rep, a.config);
    ck::report::add_result(rep, "F_P_eff", r.value, "", "(tau_ref/tau_cav - 1)/eta_QE");
    rep["suppression"] = r.suppression;
    ck::report::write(rep, out_path(a.output, "purcell_from_decay.json"));
}

// ---------------------------------------------------------------- budget

void run_budget(const std::string& config, const std::string& output) {
    const auto cfg = Config::load(config);
    ck::efficiency::EfficiencyChain chain;
    for (const auto& key : cfg.keys_with_prefix("factor.")) {
        ck::efficiency::Factor f;
        f.name = key.substr(7);
        f.value = cfg.number(key);
        if (const auto p = cfg.text_opt("provenance." + f.name))
            f.provenance = ck::efficiency::provenance_from_string(*p);
        chain.factors.push_back(f);
    }
    if (chain.factors.empty()) throw std::invalid_argument(config + ": no factor.* keys");

    auto rep = ck::report::make_report("budget");
    ck::report::add_input(rep, config);
    for (const auto& f : chain.factors)
        rep["results"][f.name] = {{"value", f.value},
                                  {"unit", ""},
                                  {"formula", "provenance: " + ck::efficiency::to_string(f.provenance)}};
    ck::report::add_result(rep, "eta_total", ck::efficiency::chain_total(chain), "",
                           "product of all chain factors");

    const auto rate = cfg.quantity_opt("measured_rate", Dim::frequency);
    const auto rep_rate = cfg.quantity_opt("rep_rate", Dim::frequency);
    if (rate && rep_rate) {
        const auto exc = ck::efficiency::infer_excitation(*rate, *rep_rate, chain.total());
        ck::report::add_result(rep, "eta_exc_inferred", exc.value, "",
                               "(measured_rate / rep_rate) / chain product");
        rep["excitation_inconsistent"] = exc.inconsistent;
    }
    cfg.finish();
    ck::report::write(rep, out_path(output, "budget.json"));
}

// --------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string input, output, aux_output;
    double flank_slope = 0.0;
    double band_lo = 0.0, band_hi = 0.0;
    double rep_period_ns = 0.0;
    int n_side = 10;
    double window_start_ns = std::numeric_limits<double>::quiet_NaN();
    double prominence = 0.2;
};

json lines_to_json(const ck::trace::ResonanceFit& fit) {
    json lines = json::array();
    for (const auto& l : fit.lines)
        lines.push_back({{"center_nm", l.center * 1e9},
                         {"center_sigma_nm", l.center_sigma * 1e9},
                         {"fwhm_nm", l.fwhm * 1e9},
                         {"fwhm_sigma_nm", l.fwhm_sigma * 1e9},
                         {"amplitude", l.amplitude},
                         {"amplitude_sigma", l.amplitude_sigma}});
    return lines;
}

void run_analyze_noise(const AnalyzeArgs& a) {
    auto t = ck::csvio::read_time_trace(a.input);
    if (a.flank_slope != 0.0) t.flank_slope = a.flank_slope;
    ck::trace::NoiseOptions opt;
    opt.band_lo = a.band_lo;
    opt.band_hi = a.band_hi;
    const auto res = ck::trace::noise_spectrum(t, opt);
    ck::csvio::write_table(out_path(a.aux_output, "noise_psd.csv"),
                           "frequency_hz,psd_m2_per_hz,cumulative_rms_m",
                           {res.frequency, res.psd, res.cumulative_rms});
    auto rep = ck::report::make_report("analyze noise");
    ck::report::add_input(rep, a.input);
    ck::report::add_result(rep, "sigma_total", res.total_sigma * 1e12, "pm",
                           "sqrt of the band-integrated displacement PSD");
    if (!res.warning.empty()) rep["warning"] = res.warning;
    ck::report::write(rep, out_path(a.output, "analyze_noise.json"));
}

void run_analyze_scan(const AnalyzeArgs& a) {
    const auto sp = ck::csvio::read_spectrum(a.input);
    ck::trace::ResonanceFitOptions opt;
    opt.prominence = a.prominence;
    const auto fit = ck::trace::resonance_fit(sp, opt);
    auto rep = ck::report::make_report("analyze scan");
    ck::report::add_input(rep, a.input);
    rep["results"]["lines"] = lines_to_json(fit);
    ck::report::add_result(rep, "finesse", fit.finesse, "", "mode spacing / mean FWHM");
    ck::report::add_result(rep, "contrast", fit.contrast, "", "dip depth / baseline");
    ck::report::add_result(rep, "baseline", fit.baseline, "", "fitted offset");
    ck::report::add_result(rep, "residual_norm", fit.residual_norm, "", "sqrt(chi^2)");
    ck::report::write(rep, out_path(a.output, "analyze_scan.json"));
}

void run_analyze_dispersion(const AnalyzeArgs& a) {
    const auto scan = ck::csvio::read_dispersion(a.input);
    ck::trace::DispersionOptions opt;
    opt.peak_prominence = a.prominence;
    const auto res = ck::trace::dispersion_analyze(scan, opt);
    ck::csvio::write_spectrum(out_path(a.aux_output, "dispersion_summed.csv"), res.summed);
    auto rep = ck::report::make_report("analyze dispersion");
    ck::report::add_input(rep, a.input);
    rep["length_calibrated"] = res.length_calibrated;
    rep["contact_detected"] = res.contact_detected;
    if (res.contact_detected) {
        ck::report::add_result(rep, "L_contact", res.L_contact * 1e6, "um",
                               "optical length at the first nonlinear ridge step");
        ck::report::add_result(rep, "z_contact", res.z_set[res.contact_index] * 1e9, "nm",
                               "setpoint of the first nonlinear ridge step");
    }
    if (res.length_calibrated) {
        ck::report::add_result(rep, "z_scale", res.z_scale, "",
                               "slope of the affine z -> L_opt map");
        ck::report::add_result(rep, "z_offset", res.z_offset * 1e6, "um",
                               "offset of the affine z -> L_opt map");
    }
    json rows = json::array();
    for (std::size_t i = 0; i < res.z_set.size(); ++i) {
        json row = {{"z_set_nm", res.z_set[i] * 1e9}, {"mode_number", res.mode_number[i]}};
        row["L_opt_um"] = std::isfinite(res.L_opt[i]) ? json(res.L_opt[i] * 1e6) : json();
        row["ridge_nm"] = std::isfinite(res.ridge[i]) ? json(res.ridge[i] * 1e9) : json();
        rows.push_back(row);
    }
    rep["results"]["per_spectrum"] = rows;
    if (!res.warning.empty()) rep["warning"] = res.warning;
    ck::report::write(rep, out_path(a.output, "analyze_dispersion.json"));
}

void run_analyze_decay(const AnalyzeArgs& a) {
    const auto hist = ck::csvio::read_decay(a.input);
    ck::trace::DecayFitOptions opt;
    if (!std::isnan(a.window_start_ns)) opt.window_start = a.window_start_ns * 1e-9;
    const auto fit = ck::trace::decay_fit(hist, opt);
    auto rep = ck::report::make_report("analyze decay");
    ck::report::add_input(rep, a.input);
    ck::report::add_result(rep, "tau", fit.tau * 1e9, "ns",
                           "Poisson MLE of A exp(-t/tau) + bg (IRF-convolved)");
    ck::report::add_result(rep, "tau_sigma", fit.tau_sigma * 1e9, "ns",
                           "1-sigma from the likelihood curvature");
    ck::report::add_result(rep, "amplitude", fit.amplitude, "counts", "fitted peak amplitude");
    ck::report::add_result(rep, "background", fit.background, "counts/bin", "fitted constant");
    ck::report::add_result(rep, "nll", fit.nll, "", "sum(m - c ln m) at the optimum");
    rep["at_bounds"] = fit.at_bounds;
    if (!fit.warning.empty()) rep["warning"] = fit.warning;
    ck::report::write(rep, out_path(a.output, "analyze_decay.json"));
}

void run_analyze_g2(const AnalyzeArgs& a) {
    if (!(a.rep_period_ns > 0))
        throw std::invalid_argument("analyze g2: --rep-period-ns is required");
    const auto hist = ck::csvio::read_g2(a.input, a.rep_period_ns * 1e-9);
    ck::trace::G2Options opt;
    opt.n_side_peaks = a.n_side;
    const auto res = ck::trace::g2_raw(hist, opt);
    auto rep = ck::report::make_report("analyze g2");
    ck::report::add_input(rep, a.input);
    ck::report::add_result(rep, "g2_raw", res.g2, "",
                           "central peak area / mean side-peak area");
    ck::report::add_result(rep, "central_area", res.central_area, "counts", "+-T/4 window sum");
    ck::report::add_result(rep, "mean_side_area", res.mean_side_area, "counts",
                           "+-T/4 window sum, averaged");
    ck::report::add_result(rep, "on_fraction", res.on_fraction, "",
                           "1/(1+b) from the bunching envelope A(1 + b exp(-|t|/tau_b))");
    rep["envelope_fitted"] = res.envelope_fitted;
    if (!res.warning.empty()) rep["warning"] = res.warning;
    ck::report::write(rep, out_path(a.output, "analyze_g2.json"));
}

// ----------------------------------------------------------------- synth

void run_synth(const std::string& kind, const std::string& config, std::uint64_t seed,
               const std::string& output) {
    const auto cfg = Config::load(config);
    if (kind == "noise") {
        ck::synth::NoiseTraceParams p;
        p.sample_rate = cfg.quantity_opt("sample_rate", Dim::frequency).value_or(p.sample_rate);
        p.duration = cfg.quantity_opt("duration", Dim::time).value_or(p.duration);
        p.flank_slope = cfg.number_opt("flank_slope_per_m").value_or(p.flank_slope);
        p.band_lo = cfg.quantity_opt("band_lo", Dim::frequency).value_or(p.band_lo);
        p.band_hi = cfg.quantity_opt("band_hi", Dim::frequency).value_or(p.band_hi);
        p.sigma = cfg.quantity_opt("sigma", Dim::length).value_or(p.sigma);
        cfg.finish();
        ck::csvio::write_time_trace(out_path(output, "synth_noise.csv"), noise_trace(p, seed));
    } else if (kind == "scan") {
        ck::synth::ResonanceScanParams p;
        p.x_min = cfg.quantity("x_min", Dim::length);
        p.x_max = cfg.quantity("x_max", Dim::length);
        p.n_points = static_cast<int>(cfg.number_opt("n_points").value_or(p.n_points));
        p.baseline = cfg.number_opt("baseline").value_or(p.baseline);
        for (double c : parse_list(cfg.text("centers_nm"))) p.centers.push_back(c * 1e-9);
        for (double w : parse_list(cfg.text("fwhm_nm"))) p.fwhm.push_back(w * 1e-9);
        p.amplitudes = parse_list(cfg.text("amplitudes"));
        p.noise_rel = cfg.number_opt("noise_rel").value_or(0.0);
        cfg.finish();
        ck::csvio::write_spectrum(out_path(output, "synth_scan.csv"), resonance_scan(p, seed));
    } else if (kind == "dispersion") {
        ck::synth::DispersionScanParams p;
        p.z_start = cfg.quantity_opt("z_start", Dim::length).value_or(p.z_start);
        p.z_step = cfg.quantity_opt("z_step", Dim::length).value_or(p.z_step);
        p.n_z = static_cast<int>(cfg.number_opt("n_z").value_or(p.n_z));
        p.L_start = cfg.quantity_opt("L_start", Dim::length).value_or(p.L_start);
        p.dLdz = cfg.number_opt("dLdz").value_or(p.dLdz);
        if (const auto cz = cfg.quantity_opt("contact_z", Dim::length)) p.contact_z = *cz;
        p.lambda_min = cfg.quantity_opt("lambda_min", Dim::length).value_or(p.lambda_min);
        p.lambda_max = cfg.quantity_opt("lambda_max", Dim::length).value_or(p.lambda_max);
        p.n_lambda = static_cast<int>(cfg.number_opt("n_lambda").value_or(p.n_lambda));
        p.mode_fwhm = cfg.quantity_opt("mode_fwhm", Dim::length).value_or(p.mode_fwhm);
        p.amplitude = cfg.number_opt("amplitude").value_or(p.amplitude);
        if (const auto t = cfg.text_opt("emitter_centers_nm"))
            for (double c : parse_list(*t)) p.emitter_centers.push_back(c * 1e-9);
        p.emitter_fwhm = cfg.quantity_opt("emitter_fwhm", Dim::length).value_or(p.emitter_fwhm);
        p.background = cfg.number_opt("background").value_or(p.background);
        p.noise_rel = cfg.number_opt("noise_rel").value_or(0.0);
        cfg.finish();
        ck::csvio::write_dispersion(out_path(output, "synth_dispersion.csv"),
                                    dispersion_scan(p, seed));
    } else if (kind == "decay") {
        ck::synth::DecayParams p;
        p.bin_width = cfg.quantity_opt("bin_width", Dim::time).value_or(p.bin_width);
        p.n_bins = static_cast<int>(cfg.number_opt("n_bins").value_or(p.n_bins));
        p.t0 = cfg.quantity_opt("t0", Dim::time).value_or(p.t0);
        p.tau = cfg.quantity("tau", Dim::time);
        p.peak_counts = cfg.number_opt("peak_counts").value_or(p.peak_counts);
        p.background = cfg.number_opt("background").value_or(p.background);
        p.irf_fwhm = cfg.quantity_opt("irf_fwhm", Dim::time).value_or(0.0);
        p.poisson = cfg.number_opt("poisson").value_or(1.0) != 0.0;
        cfg.finish();
        ck::csvio::write_decay(out_path(output, "synth_decay.csv"), decay_histogram(p, seed));
    } else if (kind == "g2") {
        ck::synth::G2Params p;
        p.bin_width = cfg.quantity_opt("bin_width", Dim::time).value_or(p.bin_width);
        p.rep_period = cfg.quantity_opt("rep_period", Dim::time).value_or(p.rep_period);
        p.n_side = static_cast<int>(cfg.number_opt("n_side").value_or(p.n_side));
        p.peak_sigma = cfg.quantity_opt("peak_sigma", Dim::time).value_or(p.peak_sigma);
        p.side_area = cfg.number_opt("side_area").value_or(p.side_area);
        p.g2_center = cfg.number_opt("g2_center").value_or(p.g2_center);
        p.n_norm = static_cast<int>(cfg.number_opt("n_norm").value_or(p.n_norm));
        p.blink_b = cfg.number_opt("blink_b").value_or(0.0);
        p.blink_tau = cfg.quantity_opt("blink_tau", Dim::time).value_or(p.blink_tau);
        p.poisson = cfg.number_opt("poisson").value_or(0.0) != 0.0;
        cfg.finish();
        ck::csvio::write_g2(out_path(output, "synth_g2.csv"), g2_histogram(p, seed));
    } else {
        throw std::invalid_argument("unknown synth kind: " + kind);
    }
}

// ---------------------------------------------------------------- dipole

struct DipoleArgs {
    std::string stack, output;
    double wavelength_nm = 1310.0;
    double n_host = 3.41;
    double min_nm = 0.0, max_nm = 655.0;
    int points = 200;
    double s_max = 5.0;
    ck::Exec exec = ck::Exec::parallel;
};

void run_dipole_pec(const DipoleArgs& a) {
    const auto grid = lin_grid(a.min_nm, a.max_nm, a.points);
    std::vector<double> par(grid.size()), perp(grid.size()), avg(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double d = grid[i] * 1e-9;
        par[i] = ck::dipole::pec_enhancement(d, a.wavelength_nm * 1e-9, a.n_host,
                                             ck::dipole::Orientation::parallel);
        perp[i] = ck::dipole::pec_enhancement(d, a.wavelength_nm * 1e-9, a.n_host,
                                              ck::dipole::Orientation::perpendicular);
        avg[i] = (2.0 * par[i] + perp[i]) / 3.0;
    }
    ck::csvio::write_table(out_path(a.output, "dipole_pec.csv"),
                           "distance_nm,parallel,perpendicular,average", {grid, par, perp, avg});
}

void run_dipole_dbr(const DipoleArgs& a) {
    const auto stack = ck::layered::load_stack_file(a.stack);
    const auto grid_nm = lin_grid(a.min_nm, a.max_nm, a.points);
    std::vector<double> d(grid_nm.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = grid_nm[i] * 1e-9;
    ck::dipole::AngularSpectrumOptions opt;
    opt.s_max = a.s_max;
    const auto curve = ck::dipole::enhancement_curve(stack, d, a.wavelength_nm * 1e-9, a.n_host,
                                                     opt, a.exec);
    ck::csvio::write_table(out_path(a.output, "dipole_dbr.csv"),
                           "distance_nm,parallel,perpendicular,average",
                           {grid_nm, curve.parallel, curve.perpendicular, curve.average});
}

// ------------------------------------------------------------- reproduce

struct ReproduceArgs {
    std::string data_dir = "data";
    std::string output_dir;
    ck::Exec exec = ck::Exec::parallel;
};

std::string repro_out(const ReproduceArgs& a, const std::string& name) {
    return (a.output_dir.empty() ? out_dir() : a.output_dir) + "/" + name;
}

void run_reproduce_fig5(const ReproduceArgs& a) {
    const std::string cfg_path = a.data_dir + "/configs/fig5.conf";
    const auto cfg = Config::load(cfg_path);
    const auto em = emitter_from_config(cfg);
    const auto cav = cavity_from_config(cfg);
    std::vector<double> sigmas;
    for (double pm : parse_list(cfg.text("sigma_list_pm"))) sigmas.push_back(pm * 1e-12);
    const auto grid = log_grid(cfg.number("finesse_min"), cfg.number("finesse_max"),
                               static_cast<int>(cfg.number("finesse_points")));
    write_purcell_curve(em, cav, sigmas, grid, a.exec, repro_out(a, "fig5_curves.csv"));

    const auto pts_f = parse_list(cfg.text("measured_finesse"));
    const auto pts_fp = parse_list(cfg.text("measured_fp"));
    if (pts_f.size() != pts_fp.size())
        throw std::invalid_argument(cfg_path + ": measured point lists differ in length");
    ck::csvio::write_table(repro_out(a, "fig5_points.csv"), "finesse,fp_measured",
                           {pts_f, pts_fp});

    const auto curve = ck::purcell::purcell_curve(em, cav, {}, {grid.front()}, ck::Exec::serial);
    auto rep = ck::report::make_report("reproduce fig5");
    ck::report::add_input(rep, cfg_path);
    ck::report::add_result(rep, "crossover_finesse", curve.crossover_finesse, "",
                           "F with dnu_cav(F) = dnu_em");
    ck::report::add_result(rep, "two_g0_over_2pi", curve.two_g0 / (2.0 * ck::kPi) / 1e9, "GHz",
                           "2 g0, emitter-cavity coupling rate");
    cfg.finish();
    ck::report::write(rep, repro_out(a, "fig5.json"));
}

void run_reproduce_table1(const ReproduceArgs& a) {
    const std::string cfg_path = a.data_dir + "/configs/table1.conf";
    const auto cfg = Config::load(cfg_path);
    const double eta_qe = cfg.number("eta_qe");
    auto rep = ck::report::make_report("reproduce table1");
    ck::report::add_input(rep, cfg_path);
    json rows = json::array();
    for (const std::string qd : {"a", "b", "c"}) {
        const double lam = cfg.quantity("qd_" + qd + "_wavelength", Dim::length);
        const double tau_ref = cfg.quantity("qd_" + qd + "_tau_ref", Dim::time);
        const double tau_cav = cfg.quantity("qd_" + qd + "_tau_cav", Dim::time);
        const double peak = cfg.number("qd_" + qd + "_peak_counts");
        const auto seed = static_cast<std::uint64_t>(cfg.number("qd_" + qd + "_seed"));

        auto fit_one = [&](double tau, std::uint64_t s, const std::string& file) {
            ck::synth::DecayParams p;
            p.tau = tau;
            p.peak_counts = peak;
            p.irf_fwhm = 0.12e-9;
            p.bin_width = 4e-12;
            p.n_bins = 1500;
            p.t0 = 0.5e-9;
            const auto hist = ck::synth::decay_histogram(p, s);
            ck::csvio::write_decay(repro_out(a, file), hist);
            return ck::trace::decay_fit(hist);
        };
        const auto ref = fit_one(tau_ref, seed, "table1_qd" + qd + "_ref.csv");
        const auto cavf = fit_one(tau_cav, seed + 1, "table1_qd" + qd + "_cav.csv");
        const auto fp = ck::purcell::purcell_from_decay(ref.tau, cavf.tau, eta_qe);
        rows.push_back({{"qd", "QD " + std::string(1, std::toupper(qd[0]))},
                        {"wavelength_nm", lam * 1e9},
                        {"tau_ref_ns", ref.tau * 1e9},
                        {"tau_ref_sigma_ns", ref.tau_sigma * 1e9},
                        {"tau_cav_ns", cavf.tau * 1e9},
                        {"tau_cav_sigma_ns", cavf.tau_sigma * 1e9},
                        {"decay_ratio", ref.tau / cavf.tau},
                        {"fp_eff", fp.value}});
    }
    rep["results"]["rows"] = rows;
    rep["results"]["formula"] = "F_P,eff = (tau_ref/tau_cav - 1)/eta_QE";
    cfg.finish();
    ck::report::write(rep, repro_out(a, "table1.json"));
}

void run_reproduce_table2(const ReproduceArgs& a) {
    const std::string cfg_path = a.data_dir + "/configs/table2.conf";
    const auto cfg = Config::load(cfg_path);
    const double eta_qe = cfg.number("eta_qe");
    const double fp = cfg.number("fp_eff");
    const double t_fib = cfg.quantity("fib_transmission", Dim::dimensionless);
    const double l_tot = cfg.quantity("loss_total", Dim::dimensionless);
    const double w_f = cfg.quantity("w_fiber", Dim::length);
    const double w_m = cfg.quantity("w_mirror", Dim::length);
    const double n_f = cfg.number("n_fiber");
    const double rc = cfg.quantity("rc_fiber", Dim::length);
    const double lam = cfg.quantity("wavelength", Dim::length);
    const double eta_setup = cfg.number("eta_setup");
    const double eta_det = cfg.number("eta_det");

    namespace eff = ck::efficiency;
    eff::EfficiencyChain chain;
    chain.factors = {
        {"eta_qe", eta_qe, eff::Provenance::measured},
        {"eta_mode", eff::mode_fraction(fp), eff::Provenance::calculated},
        {"eta_trans", eff::mirror_outcoupling(t_fib, l_tot), eff::Provenance::calculated},
        {"eta_fib", eff::fiber_mode_match(w_f, w_m, n_f, lam, rc), eff::Provenance::calculated},
        {"eta_setup", eta_setup, eff::Provenance::measured},
        {"eta_det", eta_det, eff::Provenance::manufacturer},
    };
    auto rep = ck::report::make_report("reproduce table2");
    ck::report::add_input(rep, cfg_path);
    const char* formulas[] = {"measured blinking duty cycle",
                              "F_P/(1+F_P)",
                              "T_fib/L_tot",
                              "4/((wf/wm+wm/wf)^2 + (pi nf wf wm/(lambda RC))^2)",
                              "measured",
                              "manufacturer"};
    for (std::size_t i = 0; i < chain.factors.size(); ++i)
        ck::report::add_result(rep, chain.factors[i].name, chain.factors[i].value, "",
                               formulas[i]);
    ck::report::add_result(rep, "eta_total", eff::chain_total(chain), "",
                           "product of all chain factors");
    const double rate = cfg.quantity("measured_rate", Dim::frequency);
    const double rr = cfg.quantity("rep_rate", Dim::frequency);
    const auto exc = eff::infer_excitation(rate, rr, chain.total());
    ck::report::add_result(rep, "eta_exc_inferred", exc.value, "",
                           "(measured_rate/rep_rate)/eta_total");
    cfg.finish();
    ck::report::write(rep, repro_out(a, "table2.json"));
}

void run_reproduce_fig2a(const ReproduceArgs& a) {
    const std::string stack_path = a.data_dir + "/stacks/cavity_full.stack";
    const auto stack = ck::layered::load_stack_file(stack_path);
    const double lam = 1310e-9;
    auto prof = ck::layered::field_profile(stack, lam, 0.5e-9);
    apply_ref_normalization(stack, prof, lam);
    std::vector<double> z_nm(prof.z.size());
    for (std::size_t i = 0; i < z_nm.size(); ++i) z_nm[i] = prof.z[i] * 1e9;
    ck::csvio::write_table(repro_out(a, "fig2a_field.csv"), "z_nm,intensity,index",
                           {z_nm, prof.intensity, prof.index});
    auto rep = ck::report::make_report("reproduce fig2a");
    ck::report::add_input(rep, stack_path);
    ck::report::add_result(rep, "L_eff", ck::layered::effective_length(prof) * 1e6, "um",
                           "L_eff = 2 int |E|^2 n^2 / (|E_ref|^2 n_ref^2) dz");
    ck::report::write(rep, repro_out(a, "fig2a.json"));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fiber Fabry-Perot micro-cavity toolkit"};
    app.require_subcommand(1);
    std::function<void()> action;

    bool serial = false;
    app.add_flag("--serial", serial, "run parallel kernels on a single thread");
    auto exec = [&] { return serial ? ck::Exec::serial : ck::Exec::parallel; };

    // tmm
    auto* tmm = app.add_subcommand("tmm", "transfer-matrix simulations");
    tmm->require_subcommand(1);
    static TmmArgs tmm_args;
    for (const auto& [name, desc] :
         std::vector<std::pair<std::string, std::string>>{
             {"spectrum", "reflectance/transmittance spectrum"},
             {"field", "standing-wave intensity profile"},
             {"leff", "effective energy distribution length"},
             {"penetration", "mirror frequency penetration depth"}}) {
        auto* sub = tmm->add_subcommand(name, desc);
        sub->add_option("--stack", tmm_args.stack, "stack definition file")->required();
        sub->add_option("-o,--output", tmm_args.output, "output path");
        sub->add_option("--wavelength-nm", tmm_args.wavelength_nm, "wavelength [nm]");
        if (name == "spectrum") {
            sub->add_option("--min-nm", tmm_args.min_nm, "start wavelength [nm]");
            sub->add_option("--max-nm", tmm_args.max_nm, "end wavelength [nm]");
            sub->add_option("--points", tmm_args.points, "grid size");
        } else {
            sub->add_option("--step-nm", tmm_args.step_nm, "spatial grid step [nm]");
        }
        const std::string n = name;
        sub->callback([&, n] {
            tmm_args.exec = exec();
            action = [n] {
                if (n == "spectrum") run_tmm_spectrum(tmm_args);
                else if (n == "field") run_tmm_field(tmm_args);
                else if (n == "leff") run_tmm_leff(tmm_args);
                else run_tmm_penetration(tmm_args);
            };
        });
    }

    // metrics
    auto* metrics = app.add_subcommand("metrics", "loss, finesse and mode geometry");
    metrics->require_subcommand(1);
    static MetricsArgs metrics_args;
    for (const std::string name : {"finesse", "contrast", "scatter", "geometry"}) {
        auto* sub = metrics->add_subcommand(name, "");
        sub->add_option("--config", metrics_args.config, "parameter file")->required();
        sub->add_option("-o,--output", metrics_args.output, "output path");
        sub->callback([&, name] {
            action = [name] {
                if (name == "finesse") run_metrics_finesse(metrics_args);
                else if (name == "contrast") run_metrics_contrast(metrics_args);
                else if (name == "scatter") run_metrics_scatter(metrics_args);
                else run_metrics_geometry(metrics_args);
            };
        });
    }

    // purcell
    auto* purcell = app.add_subcommand("purcell", "ideal and jitter-broadened Purcell factors");
    purcell->require_subcommand(1);
    static PurcellArgs purcell_args;
    for (const std::string name : {"ideal", "jitter", "curve", "from-decay"}) {
        auto* sub = purcell->add_subcommand(name, "");
        sub->add_option("--config", purcell_args.config, "parameter file")->required();
        sub->add_option("-o,--output", purcell_args.output, "output path");
        sub->callback([&, name] {
            purcell_args.exec = exec();
            action = [name] {
                if (name == "ideal") run_purcell_ideal(purcell_args);
                else if (name == "jitter") run_purcell_jitter(purcell_args);
                else if (name == "curve") run_purcell_curve(purcell_args);
                else run_purcell_from_decay(purcell_args);
            };
        });
    }

    // budget
    auto* budget = app.add_subcommand("budget", "photon efficiency chain");
    static std::string budget_config, budget_output;
    budget->add_option("--config", budget_config, "chain definition file")->required();
    budget->add_option("-o,--output", budget_output, "output path");
    budget->callback([&] { action = [] { run_budget(budget_config, budget_output); }; });

    // analyze
    auto* analyze = app.add_subcommand("analyze", "measurement-record analysis");
    analyze->require_subcommand(1);
    static AnalyzeArgs an;
    {
        auto* sub = analyze->add_subcommand("noise", "flank-noise to cumulative RMS displacement");
        sub->add_option("--input", an.input, "time trace CSV (time_s,intensity)")->required();
        sub->add_option("--flank-slope", an.flank_slope, "intensity per meter calibration")
            ->required();
        sub->add_option("--band-lo", an.band_lo, "band lower edge [Hz]");
        sub->add_option("--band-hi", an.band_hi, "band upper edge [Hz]");
        sub->add_option("-o,--output", an.output, "report path");
        sub->add_option("--csv", an.aux_output, "PSD curve path");
        sub->callback([&] { action = [] { run_analyze_noise(an); }; });
    }
    {
        auto* sub = analyze->add_subcommand("scan", "Lorentzian resonance fit");
        sub->add_option("--input", an.input, "spectrum CSV (wavelength_nm,counts)")->required();
        sub->add_option("--prominence", an.prominence, "peak detection threshold");
        sub->add_option("-o,--output", an.output, "report path");
        sub->callback([&] { action = [] { run_analyze_scan(an); }; });
    }
    {
        auto* sub = analyze->add_subcommand("dispersion", "length-scan processing");
        sub->add_option("--input", an.input, "scan CSV (z_set_nm,wavelength_nm,counts)")
            ->required();
        sub->add_option("--prominence", an.prominence, "peak detection threshold");
        sub->add_option("-o,--output", an.output, "report path");
        sub->add_option("--csv", an.aux_output, "summed spectrum path");
        sub->callback([&] { action = [] { run_analyze_dispersion(an); }; });
    }
    {
        auto* sub = analyze->add_subcommand("decay", "IRF-convolved lifetime fit");
        sub->add_option("--input", an.input, "decay CSV (time_ns,counts[,irf])")->required();
        sub->add_option("--window-start-ns", an.window_start_ns, "fit window start [ns]");
        sub->add_option("-o,--output", an.output, "report path");
        sub->callback([&] { action = [] { run_analyze_decay(an); }; });
    }
    {
        auto* sub = analyze->add_subcommand("g2", "coincidence peak-area analysis");
        sub->add_option("--input", an.input, "histogram CSV (delay_ns,coincidences)")->required();
        sub->add_option("--rep-period-ns", an.rep_period_ns, "pulse period [ns]")->required();
        sub->add_option("--n-side", an.n_side, "side peaks for the Poisson level");
        sub->add_option("-o,--output", an.output, "report path");
        sub->callback([&] { action = [] { run_analyze_g2(an); }; });
    }

    // synth
    auto* synth = app.add_subcommand("synth", "deterministic synthetic records");
    static std::string synth_kind, synth_config, synth_output;
    static std::uint64_t synth_seed = 1;
    synth->add_option("kind", synth_kind, "noise|scan|dispersion|decay|g2")->required();
    synth->add_option("--config", synth_config, "generator parameter file")->required();
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("-o,--output", synth_output, "output path");
    synth->callback(
        [&] { action = [] { run_synth(synth_kind, synth_config, synth_seed, synth_output); }; });

    // dipole
    auto* dipole = app.add_subcommand("dipole", "emission rate near a planar mirror");
    dipole->require_subcommand(1);
    static DipoleArgs dip;
    for (const std::string name : {"pec", "dbr"}) {
        auto* sub = dipole->add_subcommand(
            name, name == "pec" ? "perfect-conductor analytics" : "multilayer angular spectrum");
        if (name == "dbr")
            sub->add_option("--stack", dip.stack, "mirror stack file")->required();
        sub->add_option("--wavelength-nm", dip.wavelength_nm, "wavelength [nm]");
        sub->add_option("--n-host", dip.n_host, "host refractive index");
        sub->add_option("--min-nm", dip.min_nm, "first distance [nm]");
        sub->add_option("--max-nm", dip.max_nm, "last distance [nm]");
        sub->add_option("--points", dip.points, "grid size");
        if (name == "dbr") sub->add_option("--smax", dip.s_max, "evanescent cutoff s_max");
        sub->add_option("-o,--output", dip.output, "output path");
        sub->callback([&, name] {
            dip.exec = exec();
            action = [name] {
                if (name == "pec") run_dipole_pec(dip);
                else run_dipole_dbr(dip);
            };
        });
    }

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "end-to-end pipelines on bundled inputs");
    repro->require_subcommand(1);
    static ReproduceArgs ra;
    for (const std::string name : {"fig5", "table1", "table2", "fig2a"}) {
        auto* sub = repro->add_subcommand(name, "");
        sub->add_option("--data-dir", ra.data_dir, "bundled data directory");
        sub->add_option("-o,--outdir", ra.output_dir, "output directory");
        sub->callback([&, name] {
            ra.exec = exec();
            action = [name] {
                if (name == "fig5") run_reproduce_fig5(ra);
                else if (name == "table1") run_reproduce_table1(ra);
                else if (name == "table2") run_reproduce_table2(ra);
                else run_reproduce_fig2a(ra);
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        action();
    } catch (const std::invalid_argument& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::runtime_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
