#ifndef CIRCLEMAP_FOURIER_HPP
#define CIRCLEMAP_FOURIER_HPP

#include <vector>

#include "circlemap/map_expr.hpp"

namespace circlemap {

struct TrigProjection {
    double mean = 0.0;  // mean of H(x) - d x (not representable by a trig lift)
    std::vector<double> cos_coeffs;
    std::vector<double> sin_coeffs;
};

/// Fourier modes of the periodic part H(x) - d x; an export utility only
/// (composition and inversion leave the trig-polynomial class, so nothing in
/// the evaluation path projects).
inline TrigProjection trig_projection(const MapExpr& H, int modes, int grid) {
    TrigProjection out;
    out.cos_coeffs.assign(static_cast<size_t>(modes), 0.0);
    out.sin_coeffs.assign(static_cast<size_t>(modes), 0.0);
    int d = H.degree();
    double two_pi_d = 2.0 * scalar_traits<double>::pi();
    for (int i = 0; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double v = H.eval(x) - d * x;
        out.mean += v;
        for (int k = 1; k <= modes; ++k) {
            out.cos_coeffs[static_cast<size_t>(k - 1)] += v * std::cos(two_pi_d * k * x);
            out.sin_coeffs[static_cast<size_t>(k - 1)] += v * std::sin(two_pi_d * k * x);
        }
    }
    out.mean /= grid;
    for (int k = 0; k < modes; ++k) {
        out.cos_coeffs[static_cast<size_t>(k)] *= 2.0 / grid;
        out.sin_coeffs[static_cast<size_t>(k)] *= 2.0 / grid;
    }
    return out;
}

} // namespace circlemap

#endif
