#ifndef CIRCLEMAP_NORMALIZE_HPP
#define CIRCLEMAP_NORMALIZE_HPP

#include <vector>

#include "circlemap/map_expr.hpp"
#include "circlemap/orbits.hpp"
#include "circlemap/polynomial.hpp"

namespace circlemap {

/// phi = (1/L) sum_{k<N} H^k with L = (d^N - 1)/(d - 1); a degree-1 lift.
MapPtr averaging_conjugacy(MapPtr H, int N);

struct DerivIdentityReport {
    double max_residual = 0.0;   // |Hhat'(phi(x)) - ratio(x)| over the grid
    double min_ratio = 0.0;      // min of the ratio (>= 1 for metrically expanding H)
    double eq_locus_max_dist = 0.0;  // max distance of near-1 ratio points to Par
    int grid = 0;
};

/// Pointwise check of Hhat'(phi(x)) = sum_{k=1..N} (H^k)'(x) / sum_{k=0..N-1} (H^k)'(x)
/// and of the >= 1 lower bound with equality only near Par(H).
DerivIdentityReport verify_deriv_identity(const MapExpr& H, const MapExpr& phi,
                                          const MapExpr& Hhat, int N, int grid,
                                          const std::vector<double>& par_points,
                                          double eq_tol = 1e-7);

struct CycleNormalization {
    PeriodicOrbit orbit;            // of the input map
    int n = 0;                      // half the parabolic multiplicity
    std::vector<double> points_out; // orbit of the normalized map
    Polynomial<double> P_check;     // combined block of degree <= 4n-1
    double P_check_at_0 = 0.0;
    double cross_discrepancy = 0.0; // max coefficient spread across the cycle
    double multiplier_error = 0.0;  // |c1 - 1| of the normalized jets
};

struct NormalizationResult {
    int N = 1;
    double L = 1.0;
    MapPtr phi0, phi1;  // the two averaging conjugators
    MapPtr H1, H2;      // intermediate and final maps
    MapPtr phi;         // phi1 o phi0
    std::vector<CycleNormalization> cycles;
    DerivIdentityReport step0, step1;
};

struct NormalizeOptions {
    int max_period = 6;
    int orbit_grid = 1 << 10;
    int deriv_grid = 1 << 12;
    unsigned precision_bits = 96;
    double eps_par = 1e-3;
    OrbitOptions orbit;
};

/// Two rounds of the averaging recursion; extracts the uniform local form of
/// the result at every parabolic cycle point (order 6n jets, extended
/// precision) and reports per-cycle agreement.
NormalizationResult normalize(MapPtr H, const NormalizeOptions& opt = {});

nlohmann::json normalization_to_json(const NormalizationResult& r);

} // namespace circlemap

#endif
