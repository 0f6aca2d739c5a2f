#include "cavitykit/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cavitykit::fitting {

namespace {

double rel_step(double x, double h) { return h * std::max(std::abs(x), 1.0); }

std::vector<std::vector<double>> invert(std::vector<std::vector<double>> A) {
    const std::size_t n = A.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0) throw std::runtime_error("matrix inversion: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(inv[piv], inv[col]);
        const double d = A[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            A[col][c] /= d;
            inv[col][c] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double f = A[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                A[r][c] -= f * A[col][c];
                inv[r][c] -= f * inv[col][c];
            }
        }
    }
    return inv;
}

}  // namespace

std::vector<double> solve_linear(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = A.size();
    if (n == 0 || b.size() != n) throw std::invalid_argument("solve_linear: shape mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0) throw std::runtime_error("solve_linear: singular matrix");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= A[i][c] * x[c];
        x[i] = s / A[i][i];
    }
    return x;
}

FitResult levenberg_marquardt(const Model& model, const std::vector<double>& y,
                              const std::vector<double>& weights,
                              std::vector<double> initial, const LMOptions& opt) {
    const std::size_t n = y.size();
    const std::size_t np = initial.size();
    if (np == 0) throw std::invalid_argument("levenberg_marquardt: no parameters");
    if (!weights.empty() && weights.size() != n)
        throw std::invalid_argument("levenberg_marquardt: weight size mismatch");

    auto weighted_residuals = [&](const std::vector<double>& p) {
        std::vector<double> f = model(p);
        if (f.size() != n) throw std::invalid_argument("levenberg_marquardt: model size mismatch");
        std::vector<double> r(n);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = f[i] - y[i];
            if (!weights.empty()) r[i] *= weights[i];
        }
        return r;
    };
    auto chi2_of = [&](const std::vector<double>& r) {
        return std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    };

    FitResult result;
    result.params = initial;
    std::vector<double> r = weighted_residuals(result.params);
    double chi2 = chi2_of(r);
    double lambda = opt.lambda0;

    std::vector<std::vector<double>> J(n, std::vector<double>(np));
    std::vector<std::vector<double>> JtJ(np, std::vector<double>(np));

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        result.iterations = iter + 1;
        for (std::size_t j = 0; j < np; ++j) {
            std::vector<double> p = result.params;
            const double h = rel_step(p[j], opt.jacobian_step);
            p[j] += h;
            const std::vector<double> rj = weighted_residuals(p);
            for (std::size_t i = 0; i < n; ++i) J[i][j] = (rj[i] - r[i]) / h;
        }
        std::vector<double> g(np, 0.0);
        for (std::size_t a = 0; a < np; ++a) {
            for (std::size_t b2 = 0; b2 <= a; ++b2) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += J[i][a] * J[i][b2];
                JtJ[a][b2] = JtJ[b2][a] = s;
            }
            for (std::size_t i = 0; i < n; ++i) g[a] += J[i][a] * r[i];
        }

        bool accepted = false;
        for (int tries = 0; tries < 32 && !accepted; ++tries) {
            auto A = JtJ;
            for (std::size_t a = 0; a < np; ++a) A[a][a] *= 1.0 + lambda;
            std::vector<double> rhs(np);
            for (std::size_t a = 0; a < np; ++a) rhs[a] = -g[a];
            std::vector<double> step;
            try {
                step = solve_linear(A, rhs);
            } catch (const std::runtime_error&) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = result.params;
            for (std::size_t a = 0; a < np; ++a) trial[a] += step[a];
            std::vector<double> rt;
            double chi2t = 0.0;
            bool finite = true;
            try {
                rt = weighted_residuals(trial);
                chi2t = chi2_of(rt);
                finite = std::isfinite(chi2t);
            } catch (const std::exception&) {
                finite = false;
            }
            if (finite && chi2t <= chi2) {
                const double rel = (chi2 - chi2t) / std::max(chi2, 1e-300);
                result.params = std::move(trial);
                r = std::move(rt);
                chi2 = chi2t;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel < opt.tol) {
                    result.converged = true;
                }
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted || result.converged) {
            if (!accepted) result.converged = true;  // no downhill step left
            break;
        }
    }

    result.objective = chi2;
    // covariance from the Gauss-Newton curvature, with the reduced chi^2
    // scale when the fit is unweighted
    try {
        auto cov = invert(JtJ);
        const double dof = n > np ? static_cast<double>(n - np) : 1.0;
        const double s2 = weights.empty() ? chi2 / dof : 1.0;
        result.uncertainties.resize(np);
        for (std::size_t a = 0; a < np; ++a)
            result.uncertainties[a] = cov[a][a] > 0 ? std::sqrt(s2 * cov[a][a]) : 0.0;
    } catch (const std::runtime_error&) {
        result.uncertainties.assign(np, 0.0);
    }
    return result;
}

FitResult nelder_mead(const Objective& objective, std::vector<double> initial,
                      const NMOptions& opt) {
    const std::size_t np = initial.size();
    if (np == 0) throw std::invalid_argument("nelder_mead: no parameters");

    std::vector<std::vector<double>> simplex(np + 1, initial);
    for (std::size_t j = 0; j < np; ++j)
        simplex[j + 1][j] += rel_step(initial[j], opt.initial_step);
    std::vector<double> fval(np + 1);
    for (std::size_t v = 0; v <= np; ++v) fval[v] = objective(simplex[v]);

    FitResult result;
    auto order = [&] {
        std::vector<std::size_t> idx(np + 1);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return fval[a] < fval[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fval[i]);
        }
        simplex = std::move(s2);
        fval = std::move(f2);
    };

    int iter = 0;
    for (; iter < opt.max_iterations; ++iter) {
        order();
        if (std::abs(fval[np] - fval[0]) <=
            opt.tol * (std::abs(fval[0]) + std::abs(fval[np]) + 1e-300)) {
            result.converged = true;
            break;
        }
        std::vector<double> centroid(np, 0.0);
        for (std::size_t v = 0; v < np; ++v)
            for (std::size_t j = 0; j < np; ++j) centroid[j] += simplex[v][j] / np;

        auto blend = [&](double coef) {
            std::vector<double> p(np);
            for (std::size_t j = 0; j < np; ++j)
                p[j] = centroid[j] + coef * (simplex[np][j] - centroid[j]);
            return p;
        };

        const std::vector<double> refl = blend(-1.0);
        const double frefl = objective(refl);
        if (frefl < fval[0]) {
            const std::vector<double> exp_p = blend(-2.0);
            const double fexp = objective(exp_p);
            if (fexp < frefl) {
                simplex[np] = exp_p;
                fval[np] = fexp;
            } else {
                simplex[np] = refl;
                fval[np] = frefl;
            }
        } else if (frefl < fval[np - 1]) {
            simplex[np] = refl;
            fval[np] = frefl;
        } else {
            const std::vector<double> contr = blend(frefl < fval[np] ? -0.5 : 0.5);
            const double fcontr = objective(contr);
            if (fcontr < std::min(frefl, fval[np])) {
                simplex[np] = contr;
                fval[np] = fcontr;
            } else {
                for (std::size_t v = 1; v <= np; ++v) {
                    for (std::size_t j = 0; j < np; ++j)
                        simplex[v][j] = 0.5 * (simplex[v][j] + simplex[0][j]);
                    fval[v] = objective(simplex[v]);
                }
            }
        }
    }
    order();
    result.iterations = iter;
    result.params = simplex[0];
    result.objective = fval[0];
    try {
        result.uncertainties = curvature_uncertainties(numeric_hessian(objective, result.params));
    } catch (const std::exception&) {
        result.uncertainties.assign(np, 0.0);
    }
    return result;
}

std::vector<std::vector<double>> numeric_hessian(const Objective& objective,
                                                 const std::vector<double>& at, double h) {
    const std::size_t np = at.size();
    std::vector<std::vector<double>> H(np, std::vector<double>(np, 0.0));
    const double f0 = objective(at);
    std::vector<double> hs(np);
    for (std::size_t j = 0; j < np; ++j) hs[j] = rel_step(at[j], h);

    for (std::size_t a = 0; a < np; ++a) {
        std::vector<double> p = at;
        p[a] = at[a] + hs[a];
        const double fp = objective(p);
        p[a] = at[a] - hs[a];
        const double fm = objective(p);
        H[a][a] = (fp - 2.0 * f0 + fm) / (hs[a] * hs[a]);
        for (std::size_t b = 0; b < a; ++b) {
            std::vector<double> q = at;
            q[a] = at[a] + hs[a];
            q[b] = at[b] + hs[b];
            const double fpp = objective(q);
            q[b] = at[b] - hs[b];
            const double fpm = objective(q);
            q[a] = at[a] - hs[a];
            const double fmm = objective(q);
            q[b] = at[b] + hs[b];
            const double fmp = objective(q);
            H[a][b] = H[b][a] = (fpp - fpm - fmp + fmm) / (4.0 * hs[a] * hs[b]);
        }
    }
    return H;
}

std::vector<double> curvature_uncertainties(const std::vector<std::vector<double>>& hessian,
                                            double scale) {
    const std::size_t np = hessian.size();
    std::vector<double> out(np, 0.0);
    try {
        auto cov = invert(hessian);
        for (std::size_t a = 0; a < np; ++a)
            out[a] = cov[a][a] > 0 ? std::sqrt(scale * cov[a][a]) : 0.0;
    } catch (const std::runtime_error&) {
        // leave zeros; the optimum sits on a flat or indefinite surface
    }
    return out;
}

}  // namespace cavitykit::fitting
