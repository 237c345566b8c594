#ifndef CIRCLEMAP_ROOTFIND_HPP
#define CIRCLEMAP_ROOTFIND_HPP

#include <functional>

#include "circlemap/errors.hpp"
#include "circlemap/scalars.hpp"

namespace circlemap {

/// Increasing-function root solve on a bracket [a, b] with f(a) <= 0 <= f(b):
/// bisection down to bracket_width, then Newton polished with bisection
/// fallback whenever a step leaves the bracket.
template <class T, class F, class DF>
T solve_increasing(F f, DF df, T a, T b, T fa, T fb, T bracket_width, T tol,
                   int budget = 200) {
    if (fa > T(0) || fb < T(0)) fail(ErrorCode::NonConvergence, "invalid bracket");
    if (fa == T(0)) return a;
    if (fb == T(0)) return b;
    int used = 0;
    while (b - a > bracket_width) {
        if (++used > budget) fail(ErrorCode::NonConvergence, "bisection budget exhausted");
        T m = (a + b) / T(2);
        if (m <= a || m >= b) break;  // bracket at rounding resolution
        T fm = f(m);
        if (fm == T(0)) return m;
        (fm < T(0) ? a : b) = m;
    }
    T x = (a + b) / T(2);
    T fx = f(x);
    while (abs(fx) > tol || b - a > T(4) * tol) {
        if (++used > budget) {
            // The bracket may already be at rounding resolution.
            if (b - a <= T(64) * scalar_traits<T>::eps() * (T(1) + abs(x))) return x;
            fail(ErrorCode::NonConvergence, "newton budget exhausted");
        }
        (fx < T(0) ? a : b) = x;
        T d = df(x);
        T step_ok = T(0);
        T xn = x;
        if (d > T(0)) {
            xn = x - fx / d;
            if (xn > a && xn < b) step_ok = T(1);
        }
        if (step_ok == T(0)) xn = (a + b) / T(2);
        if (xn == x) return x;
        x = xn;
        fx = f(x);
        if (fx == T(0)) return x;
        if (b - a <= T(4) * scalar_traits<T>::eps() * (T(1) + abs(x))) return x;
    }
    return x;
}

} // namespace circlemap

#endif
