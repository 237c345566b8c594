#ifndef CIRCLEMAP_METRIZE_HPP
#define CIRCLEMAP_METRIZE_HPP

#include <string>
#include <vector>

#include "circlemap/density.hpp"
#include "circlemap/map_expr.hpp"
#include "circlemap/orbits.hpp"

namespace circlemap {

/// rho(H^k(x))/rho(x) * DH^k(x).
double weighted_deriv(const MapExpr& H, const Density& rho, double x, int k);

struct AdmissibleDensityOptions {
    int strata_levels = 8;        // wells are placed on X_1..X_{strata_levels}
    int floor_levels = 8;         // rho_0 = min DH^k over X_1..X_{floor_levels}
    double beta = 0.5;            // bump amplitude at the parabolic points
    double tail = 1e-6;           // well tail mass at the half-gap
    int verify_grid = 1 << 12;
    int retries = 5;
};

struct AdmissibleDensityReport {
    DensityPtr rho;
    double rho0 = 0.0;       // min DH^k over the floor strata
    double target = 0.0;     // prescribed value at well centers
    double delta0 = 0.0;     // verified (A1) neighborhood radius
    double eta = 0.0;        // inf rho / sup rho
    double min_value = 0.0;
    double max_value = 0.0;
    int wells = 0;
    int retries_used = 0;
};

/// Well-based admissible density: value 1 with vanishing slope and positive
/// curvature at each parabolic point, depressed below min(rho_0, 2)/4 at the
/// preimage strata, globally inside (0, 2).  (A1) is verified on punctured
/// neighborhoods, (A2) on every computed stratum point; failures tighten the
/// wells and retry.
AdmissibleDensityReport build_admissible_density(
    const MapExpr& H, const std::vector<PeriodicOrbit>& par,
    const AdmissibleDensityOptions& opt = {});

/// Explicit interpolating circle diffeomorphism through (x_j, y_j): of the
/// form x + sum_j (y_j - x_j) G_j(x)/G_j(x_j) with sin^2 factor products.
/// Requires |y_j - x_j| < delta = min_gap * eps / n^2.
MapPtr adjustment_diffeo(const std::vector<double>& xs,
                         const std::vector<double>& ys, double eps);

struct HorizonOptions {
    int grid = 1 << 14;
    double eps_par = 1e-3;
    double inside_tol = 1e-9;  // allow >= 1 - tol inside the eps_par collars
    int max_horizon = 64;
};

/// Smallest N with the weighted derivative > 1 on the grid away from the
/// parabolic collars (and >= 1 - tol inside them).
int find_horizon(const MapExpr& H, const Density& rho,
                 const std::vector<double>& par_points,
                 const HorizonOptions& opt = {});

DensityPtr rho_star(MapPtr H, DensityPtr rho, int N);

/// phi(x) = C * integral_0^x of the density, 1/C = full-period integral.
MapPtr metrizing_conjugacy(DensityPtr density, double quad_tol);

struct MetrizeOptions {
    int max_period = 6;
    int orbit_grid = 1 << 10;
    int grid = 1 << 14;          // certificate grid
    int residual_samples = 10000;
    double eps_par = 1e-3;
    double quad_tol = 1e-11;
    AdmissibleDensityOptions density;
    HorizonOptions horizon;
    OrbitOptions orbit;
    int threads = 1;
};

struct MetrizationReport {
    int horizon = 0;
    double eta = 0.0;
    double min_dg = 0.0;           // over the whole grid
    double max_dg = 0.0;
    double min_dg_off_par = 0.0;   // off the eps_par collars around phi(Par)
    std::vector<double> par_images;
    std::vector<double> local_minima;  // min Dg inside each collar
    double conjugator_residual = 0.0;  // max |Dg(phi(x)) - |Dh(x)|_{rho*}|
    double phi_periodicity_residual = 0.0;
    int grid = 0;
    double eps_par = 0.0;
    bool expanding_certificate = false;  // Dg > 1 off collars, >= 1 - 1e-6 everywhere
    std::string regime;                  // "parabolic" or "uniform" (no parabolic orbits)
    AdmissibleDensityReport density;
    CertificateReport tdstar;
};

struct MetrizationResult {
    MapPtr g;
    MapPtr phi;
    DensityPtr rho;
    DensityPtr rho_star;
    MetrizationReport report;
};

/// Full pipeline: certify, admissible density, horizon, aggregated density,
/// integral conjugator, conjugate, certificate scan.  Errors are wrapped with
/// the failing stage.
MetrizationResult metrize(MapPtr H, const MetrizeOptions& opt = {});

nlohmann::json metrization_report_to_json(const MetrizationReport& r);

} // namespace circlemap

#endif
