#pragma once

#include <functional>
#include <vector>

namespace cavitykit::fitting {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
// Throws on a singular system.
std::vector<double> solve_linear(std::vector<std::vector<double>> A, std::vector<double> b);

struct FitResult {
    std::vector<double> params;
    std::vector<double> uncertainties;  // 1-sigma, from the local curvature
    double objective = 0.0;             // final chi^2 or negative log-likelihood
    int iterations = 0;
    bool converged = false;
};

// Least-squares model: y_model(x_i, p) for all sample points at once.
using Model = std::function<std::vector<double>(const std::vector<double>& params)>;

struct LMOptions {
    int max_iterations = 200;
    double tol = 1e-10;          // relative decrease of chi^2
    double lambda0 = 1e-3;       // initial damping
    double jacobian_step = 1e-6; // relative finite-difference step
};

// Levenberg-Marquardt with a forward-difference Jacobian. weights are
// 1/sigma_i; pass empty for unit weights.
FitResult levenberg_marquardt(const Model& model, const std::vector<double>& y,
                              const std::vector<double>& weights,
                              std::vector<double> initial, const LMOptions& opt = {});

using Objective = std::function<double(const std::vector<double>& params)>;

struct NMOptions {
    int max_iterations = 4000;
    double tol = 1e-10;         // simplex spread in objective value
    double initial_step = 0.1;  // relative vertex displacement
};

// Nelder-Mead downhill simplex for a scalar objective. Uncertainties come
// from the inverse of the finite-difference Hessian at the optimum (zeros if
// the Hessian is not positive definite).
FitResult nelder_mead(const Objective& objective, std::vector<double> initial,
                      const NMOptions& opt = {});

// Finite-difference Hessian of a scalar objective, central differences with
// relative step h.
std::vector<std::vector<double>> numeric_hessian(const Objective& objective,
                                                 const std::vector<double>& at,
                                                 double h = 1e-4);

// 1-sigma uncertainties sigma_i = sqrt(scale * (H^-1)_ii). Use scale = 2 for
// a chi^2 objective and scale = 1 for a negative log-likelihood.
std::vector<double> curvature_uncertainties(const std::vector<std::vector<double>>& hessian,
                                            double scale = 1.0);

}  // namespace cavitykit::fitting
