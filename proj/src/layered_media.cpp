#include "cavitykit/layered_media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavitykit::layered {

namespace {

constexpr complexd kImag{0.0, 1.0};

struct Matrix2c {
    complexd a{1.0}, b{0.0}, c{0.0}, d{1.0};

    Matrix2c operator*(const Matrix2c& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
};

// Characteristic matrix of one layer for exp(-i w t) time convention.
Matrix2c layer_matrix(const Layer& l, double wavelength) {
    const double k0 = 2.0 * kPi / wavelength;
    const complexd delta = k0 * l.index * l.thickness;
    const complexd cosd = std::cos(delta);
    const complexd sind = std::sin(delta);
    return {cosd, -kImag * sind / l.index, -kImag * l.index * sind, cosd};
}

void check_wavelength(double wavelength) {
    if (!(wavelength > 0)) throw std::invalid_argument("wavelength must be > 0");
}

}  // namespace

void Layer::validate() const {
    if (!(thickness > 0) || !std::isfinite(thickness))
        throw std::invalid_argument("Layer '" + label + "': thickness must be finite and > 0");
    if (!(index.real() > 0))
        throw std::invalid_argument("Layer '" + label + "': Re(n) must be > 0");
    if (index.imag() < 0)
        throw std::invalid_argument("Layer '" + label + "': Im(n) must be >= 0");
}

void LayerStack::validate() const {
    if (layers.empty()) throw std::invalid_argument("LayerStack: no layers");
    for (const auto& l : layers) l.validate();
    if (!(incident_medium.real() > 0) || !(exit_medium.real() > 0))
        throw std::invalid_argument("LayerStack: ambient media must have Re(n) > 0");
    if (!std::isfinite(total_thickness()))
        throw std::invalid_argument("LayerStack: total thickness not finite");
}

double LayerStack::total_thickness() const {
    double t = 0.0;
    for (const auto& l : layers) t += l.thickness;
    return t;
}

bool LayerStack::lossless() const {
    if (incident_medium.imag() != 0.0 || exit_medium.imag() != 0.0) return false;
    return std::all_of(layers.begin(), layers.end(),
                       [](const Layer& l) { return l.index.imag() == 0.0; });
}

LayerStack LayerStack::reversed() const {
    LayerStack out;
    out.incident_medium = exit_medium;
    out.exit_medium = incident_medium;
    out.layers.assign(layers.rbegin(), layers.rend());
    return out;
}

AmplitudeResponse solve_stack(const LayerStack& stack, double wavelength) {
    check_wavelength(wavelength);
    stack.validate();

    Matrix2c M;
    for (const auto& l : stack.layers) M = M * layer_matrix(l, wavelength);

    const complexd eta_in = stack.incident_medium;
    const complexd eta_out = stack.exit_medium;
    const complexd B = M.a + M.b * eta_out;
    const complexd C = M.c + M.d * eta_out;

    AmplitudeResponse resp;
    resp.wavelength = wavelength;
    resp.r = (eta_in * B - C) / (eta_in * B + C);
    resp.t = 2.0 * eta_in / (eta_in * B + C);
    resp.R = std::norm(resp.r);
    resp.T = std::norm(resp.t) * eta_out.real() / eta_in.real();
    resp.A = 1.0 - resp.R - resp.T;
    if (stack.lossless() && std::abs(resp.A) < 1e-12) resp.A = 0.0;
    return resp;
}

ObliqueReflection reflection_oblique(const LayerStack& stack, double wavelength, double k_par) {
    check_wavelength(wavelength);
    stack.validate();
    const double k0 = 2.0 * kPi / wavelength;

    auto kz = [&](complexd n) {
        complexd v = std::sqrt(n * n * k0 * k0 - complexd(k_par * k_par));
        // decay away from the source for evanescent components
        if (v.imag() < 0.0) v = -v;
        // k_par exactly at a medium's light line gives kz = 0, a branch point
        // where the layer recursion can produce 0/0; the limit is smooth, so
        // step just onto the evanescent side
        if (v == complexd{}) v = complexd{0.0, 1e-12 * k0};
        return v;
    };

    std::vector<complexd> ns;
    ns.push_back(stack.incident_medium);
    for (const auto& l : stack.layers) ns.push_back(l.index);
    ns.push_back(stack.exit_medium);

    std::vector<complexd> kzs(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) kzs[i] = kz(ns[i]);

    // Parratt-style downward recursion; numerically stable for large stacks.
    complexd rs{}, rp{};
    const std::size_t nmedia = ns.size();
    for (std::size_t jj = nmedia - 1; jj-- > 0;) {
        const complexd k1 = kzs[jj], k2 = kzs[jj + 1];
        const complexd e1 = ns[jj] * ns[jj], e2 = ns[jj + 1] * ns[jj + 1];
        // at exactly the critical in-plane momentum of two identical media
        // both kz vanish and the ratios become 0/0; no contrast means r = 0
        const complexd ds = k1 + k2, dp = e2 * k1 + e1 * k2;
        const complexd rs_i = ds == complexd{} ? complexd{} : (k1 - k2) / ds;
        const complexd rp_i = dp == complexd{} ? complexd{} : (e2 * k1 - e1 * k2) / dp;
        if (jj == nmedia - 2) {
            rs = rs_i;
            rp = rp_i;
        } else {
            const double d = stack.layers[jj].thickness;
            const complexd ph = std::exp(2.0 * kImag * kzs[jj + 1] * d);
            rs = (rs_i + rs * ph) / (1.0 + rs_i * rs * ph);
            rp = (rp_i + rp * ph) / (1.0 + rp_i * rp * ph);
        }
    }
    return {rs, rp};
}

FieldProfile field_profile(const LayerStack& stack, double wavelength, double grid_step) {
    check_wavelength(wavelength);
    stack.validate();
    if (!(grid_step > 0)) throw std::invalid_argument("grid_step must be > 0");

    double n_max = std::max(stack.incident_medium.real(), stack.exit_medium.real());
    for (const auto& l : stack.layers) n_max = std::max(n_max, l.index.real());
    const double step_limit = wavelength / (20.0 * n_max);
    if (grid_step > step_limit) {
        std::ostringstream os;
        os << "grid_step too coarse: " << grid_step << " m; required <= " << step_limit
           << " m (= lambda / (20 max Re n))";
        throw std::invalid_argument(os.str());
    }

    const double k0 = 2.0 * kPi / wavelength;
    const auto resp = solve_stack(stack, wavelength);

    FieldProfile profile;
    const double margin = wavelength;

    auto sample_region = [&](complexd n, complexd Ep, complexd Em, double z0, double len) {
        const int m = std::max(2, static_cast<int>(std::ceil(len / grid_step)));
        for (int i = 0; i <= m; ++i) {
            const double zz = len * static_cast<double>(i) / m;
            const complexd E = Ep * std::exp(kImag * k0 * n * zz) +
                               Em * std::exp(-kImag * k0 * n * zz);
            profile.z.push_back(z0 + zz);
            profile.intensity.push_back(std::norm(E));
            profile.index.push_back(n.real());
        }
    };

    // incident medium margin, z in [-margin, 0]
    sample_region(stack.incident_medium, std::exp(-kImag * k0 * stack.incident_medium * margin),
                  resp.r * std::exp(kImag * k0 * stack.incident_medium * margin), -margin, margin);

    complexd Ep = 1.0, Em = resp.r;
    complexd n_prev = stack.incident_medium;
    double z0 = 0.0;
    for (const auto& l : stack.layers) {
        const complexd n = l.index;
        // continuity of E and H across the interface
        const complexd Ep2 = 0.5 * ((1.0 + n_prev / n) * Ep + (1.0 - n_prev / n) * Em);
        const complexd Em2 = 0.5 * ((1.0 - n_prev / n) * Ep + (1.0 + n_prev / n) * Em);
        sample_region(n, Ep2, Em2, z0, l.thickness);
        Ep = Ep2 * std::exp(kImag * k0 * n * l.thickness);
        Em = Em2 * std::exp(-kImag * k0 * n * l.thickness);
        n_prev = n;
        z0 += l.thickness;
    }
    {
        const complexd n = stack.exit_medium;
        const complexd Ep2 = 0.5 * ((1.0 + n_prev / n) * Ep + (1.0 - n_prev / n) * Em);
        sample_region(n, Ep2, 0.0, z0, margin);
    }
    return profile;
}

void set_normalization(FieldProfile& profile, double z_min, double z_max, double n_ref) {
    if (!(n_ref > 0)) throw std::invalid_argument("set_normalization: n_ref must be > 0");
    double imax = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < profile.z.size(); ++i) {
        if (profile.z[i] >= z_min && profile.z[i] <= z_max) {
            imax = std::max(imax, profile.intensity[i]);
            any = true;
        }
    }
    if (!any) throw std::invalid_argument("set_normalization: empty z window");
    profile.normalization_index = n_ref;
    profile.reference_intensity = imax;
}

double effective_length(const FieldProfile& profile) {
    if (profile.z.size() < 2 || profile.z.size() != profile.intensity.size() ||
        profile.z.size() != profile.index.size())
        throw std::invalid_argument("effective_length: invalid profile");
    if (!(profile.reference_intensity > 0) || !(profile.normalization_index > 0))
        throw std::invalid_argument("effective_length: zero reference field or index");

    const double denom = profile.reference_intensity * profile.normalization_index *
                         profile.normalization_index;
    double integral = 0.0;
    for (std::size_t i = 1; i < profile.z.size(); ++i) {
        const double f0 = profile.intensity[i - 1] * profile.index[i - 1] * profile.index[i - 1];
        const double f1 = profile.intensity[i] * profile.index[i] * profile.index[i];
        integral += 0.5 * (f0 + f1) * (profile.z[i] - profile.z[i - 1]);
    }
    return 2.0 * integral / denom;
}

PenetrationDepth penetration_depth(const LayerStack& mirror, double wavelength) {
    check_wavelength(wavelength);
    const double omega = 2.0 * kPi * kSpeedOfLight / wavelength;
    const double h = 1e-5 * omega;

    auto phase_at = [&](double w) {
        const double lam = 2.0 * kPi * kSpeedOfLight / w;
        return std::arg(solve_stack(mirror, lam).r);
    };

    double p0 = phase_at(omega - h);
    const double p1 = phase_at(omega);
    double p2 = phase_at(omega + h);
    // unwrap around the center sample
    while (p0 - p1 > kPi) p0 -= 2.0 * kPi;
    while (p0 - p1 < -kPi) p0 += 2.0 * kPi;
    while (p2 - p1 > kPi) p2 -= 2.0 * kPi;
    while (p2 - p1 < -kPi) p2 += 2.0 * kPi;

    const double tau = (p2 - p0) / (2.0 * h);

    PenetrationDepth out;
    out.length = kSpeedOfLight * tau / 2.0;
    out.reflectance = solve_stack(mirror, wavelength).R;
    if (out.reflectance < 0.9)
        out.warning = "mirror reflectance < 0.9 at this wavelength; group delay may not "
                      "describe a penetration depth";
    else {
        // second-difference check for stopband-edge ill-conditioning
        const double curv = std::abs(p2 - 2.0 * p1 + p0);
        if (curv > 0.1 * std::abs(p2 - p0) + 1e-12)
            out.warning = "reflection phase strongly curved; wavelength may be near a stopband edge";
    }
    return out;
}

double optical_length(const CavityGeometry& geometry) {
    geometry.validate();
    return geometry.L_pen_fib + geometry.L_air + geometry.L_mem * geometry.n_mem +
           geometry.L_pen_sc;
}

double resonant_air_gap(const LayerStack& fiber_mirror_from_gap,
                        const LayerStack& sc_mirror_from_gap,
                        double wavelength, double target_gap) {
    check_wavelength(wavelength);
    const double phi = std::arg(solve_stack(fiber_mirror_from_gap, wavelength).r) +
                       std::arg(solve_stack(sc_mirror_from_gap, wavelength).r);
    const double k = 2.0 * kPi / wavelength;
    // round-trip condition: 2 k L + phi_fib + phi_sc = 2 pi m
    const double m_real = (2.0 * k * target_gap + phi) / (2.0 * kPi);
    const double m = std::round(m_real);
    const double L = (2.0 * kPi * m - phi) / (2.0 * k);
    if (!(L > 0)) throw std::invalid_argument("resonant_air_gap: no positive resonance near target");
    return L;
}

namespace {

complexd parse_medium(std::istringstream& is, const std::string& line, int lineno,
                      const std::string& origin) {
    double re = 0.0, im = 0.0;
    if (!(is >> re)) throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                              ": expected refractive index after '=' in '" + line + "'");
    is >> im;  // optional imaginary part
    return {re, im};
}

}  // namespace

LayerStack parse_stack(const std::string& text, const std::string& origin) {
    LayerStack stack;
    bool have_in = false, have_out = false;

    std::vector<Layer> group;
    int repeat_count = 0;
    bool in_group = false;

    std::istringstream input(text);
    std::string line;
    int lineno = 0;
    while (std::getline(input, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        std::string tok;
        if (!(is >> tok)) continue;

        auto fail = [&](const std::string& msg) -> std::runtime_error {
            return std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + msg);
        };

        if (tok == "incident_medium" || tok == "exit_medium") {
            std::string eq;
            if (!(is >> eq) || eq != "=") throw fail("expected '=' after " + tok);
            const complexd n = parse_medium(is, line, lineno, origin);
            (tok[0] == 'i' ? stack.incident_medium : stack.exit_medium) = n;
            (tok[0] == 'i' ? have_in : have_out) = true;
        } else if (tok == "layer") {
            Layer l;
            double thickness_nm = 0.0, nr = 0.0, ni = 0.0;
            if (!(is >> l.label >> thickness_nm >> nr))
                throw fail("layer needs: label thickness_nm n_real [n_imag] [ref]");
            std::string extra;
            if (is >> extra) {
                try {
                    ni = std::stod(extra);
                    if (is >> extra && extra == "ref") l.normalization_ref = true;
                } catch (const std::invalid_argument&) {
                    if (extra == "ref") l.normalization_ref = true;
                    else throw fail("unrecognized layer attribute '" + extra + "'");
                }
            }
            l.thickness = thickness_nm * 1e-9;
            l.index = {nr, ni};
            l.validate();
            (in_group ? group : stack.layers).push_back(l);
        } else if (tok == "repeat") {
            if (in_group) throw fail("nested repeat groups are not supported");
            if (!(is >> repeat_count) || repeat_count < 1) throw fail("repeat needs a count >= 1");
            in_group = true;
            group.clear();
        } else if (tok == "end") {
            if (!in_group) throw fail("'end' without 'repeat'");
            for (int i = 0; i < repeat_count; ++i)
                stack.layers.insert(stack.layers.end(), group.begin(), group.end());
            in_group = false;
        } else {
            throw fail("unknown directive '" + tok + "'");
        }
    }
    if (in_group) throw std::runtime_error(origin + ": unterminated repeat group");
    if (!have_in || !have_out)
        throw std::runtime_error(origin + ": incident_medium and exit_medium are required");
    stack.validate();
    return stack;
}

LayerStack load_stack_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open stack file: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_stack(os.str(), path);
}

}  // namespace cavitykit::layered
