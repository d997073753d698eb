#pragma once
// Small numeric kernels shared across the library: adaptive quadrature with an
// absolute-error budget and bracketed bisection root finding.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace clusterfb::num {

namespace detail {

template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
         + adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace detail

// Adaptive Simpson on [a, b] with absolute tolerance.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    double fa = f(a);
    double fb = f(b);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Root of f on [lo, hi] given f(lo) <= 0 <= f(hi); bisects until the interval
// shrinks below rel_tol relative to the midpoint magnitude.
template <class F>
double bisect(const F& f, double lo, double hi, double rel_tol = 1e-10) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo > 0.0 || fhi < 0.0)
        throw std::invalid_argument("bisect: endpoints do not bracket a sign change");
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::max(std::abs(mid), 1e-300)) return mid;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if (fm < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Root of an increasing-through-zero function on (0, inf): starts from a tiny
// positive abscissa, doubles the upper end until the sign flips, then bisects.
template <class F>
double find_root_positive(const F& f, double rel_tol = 1e-10, double lo = 1e-15, double hi0 = 1.0) {
    if (f(lo) >= 0.0) return lo;
    double hi = hi0;
    for (int it = 0; it < 200 && f(hi) <= 0.0; ++it) {
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw std::runtime_error("find_root_positive: no sign change found");
    }
    return bisect(f, lo, hi, rel_tol);
}

} // namespace clusterfb::num
