#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cavitykit {

// Adaptive Simpson integration with absolute tolerance.
template <typename Fn>
double adaptive_simpson(Fn&& f, double a, double b, double tol, int max_depth = 40) {
    struct Impl {
        Fn& f;
        int max_depth;
        // error estimates left behind on intervals where the depth ran out
        double unresolved = 0.0;

        double recurse(double a, double m, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
            const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            const double flm = f(lm), frm = f(rm);
            const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            const double delta = left + right - whole;
            if (depth >= max_depth) {
                unresolved += std::abs(delta) / 15.0;
                return left + right + delta / 15.0;
            }
            if (std::abs(delta) <= 15.0 * tol)
                return left + right + delta / 15.0;
            // halving the tolerance below the roundoff floor of the partial
            // sums can never succeed; clamp it there
            const double floor = 4.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(left) + std::abs(right));
            const double tol2 = std::max(0.5 * tol, floor);
            return recurse(a, lm, m, fa, flm, fm, left, tol2, depth + 1) +
                   recurse(m, rm, b, fm, frm, fb, right, tol2, depth + 1);
        }
    };
    Impl impl{f, max_depth};
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double result = impl.recurse(a, m, b, fa, fm, fb, whole, tol, 0);
    // intervals exhausted by integrand-level roundoff noise carry error far
    // below tol; only a genuinely unresolved feature should fail the call
    if (std::isnan(result) || impl.unresolved > tol)
        throw std::runtime_error("adaptive_simpson: no convergence to tol " + std::to_string(tol));
    return result;
}

}  // namespace cavitykit
