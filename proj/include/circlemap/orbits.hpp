#ifndef CIRCLEMAP_ORBITS_HPP
#define CIRCLEMAP_ORBITS_HPP

#include <optional>
#include <string>
#include <vector>

#include "circlemap/jet.hpp"
#include "circlemap/map_expr.hpp"

namespace circlemap {

enum class OrbitClass { Repelling, Parabolic, Attracting };

inline const char* orbit_class_name(OrbitClass c) {
    switch (c) {
        case OrbitClass::Repelling: return "repelling";
        case OrbitClass::Parabolic: return "parabolic";
        case OrbitClass::Attracting: return "attracting";
    }
    return "?";
}

struct PeriodicOrbit {
    std::vector<double> points;  // p_{i+1} = H(p_i) mod 1, starting at the smallest
    int period = 1;              // minimal
    double multiplier = 0.0;     // DH^period at points[0]
    OrbitClass cls = OrbitClass::Repelling;
    int multiplicity = 0;        // 2n, present iff parabolic
};

struct OrbitOptions {
    double class_tol = 1e-8;
    double root_tol = 1e-12;
    unsigned precision_bits = 96;
    int jet_order = 8;
};

/// All fixed points of H^s in [0,1), refined to ~1e-14 (bisection + Newton).
/// Cells are subdivided adaptively; near-tangential crossings are caught via
/// derivative sign changes.  Throws ResolutionTooCoarse when subdivision
/// cannot separate roots.
std::vector<double> periodic_points(const MapExpr& H, int s, int grid);

/// Orbits of minimal period exactly s.
std::vector<PeriodicOrbit> find_periodic_orbits(const MapExpr& H, int s, int grid,
                                                const OrbitOptions& opt = {});

/// Parabolic orbits of period <= max_period.  Coverage is honest: periods
/// beyond max_period are not examined (finiteness holds but carries no
/// computable bound).
std::vector<PeriodicOrbit> par_set(const MapExpr& H, int max_period, int grid,
                                   const OrbitOptions& opt = {});

int lcm_parabolic_periods(const std::vector<PeriodicOrbit>& par);

/// The degree-many solutions of H(x) = target (mod 1) in [0,1).
std::vector<double> preimages_of_point(const MapExpr& H, double target);

struct PreimageStratum {
    int level = 0;
    std::vector<double> points;
};

/// X_0 = par, X_k = H^{-k}(par) \ H^{-k+1}(par) for k = 1..k_max.
std::vector<PreimageStratum> preimage_strata(const MapExpr& H,
                                             const std::vector<double>& par_points,
                                             int k_max);

struct CertificateReport {
    bool certified = false;
    std::vector<PeriodicOrbit> orbits;  // everything found with period <= max_period
    std::optional<PeriodicOrbit> witness;
    std::string failure_reason;
    int max_period = 0;
    int grid = 0;
    std::string caveat;
};

/// Checks that every orbit of period <= max_period is repelling or
/// parabolic-repelling (jet leading coefficient positive, odd order, plus
/// punctured-neighborhood sampling of DH^s).
CertificateReport certify_Tdstar(const MapExpr& H, int max_period, int grid,
                                 const OrbitOptions& opt = {});

/// Extended-precision jet of H around one orbit point (lift germ).
Jet<BigFloat> map_jet_big(const MapExpr& H, double p, int order);

/// Jet of H^s along the cycle, starting at points[0].
Jet<BigFloat> cycle_jet_big(const MapExpr& H, const std::vector<double>& points,
                            int order);

/// Checked high-precision jet extraction: recomputes at doubled precision and
/// throws PrecisionLoss when coefficients move by more than 1e-6 relative.
Jet<BigFloat> jet_at_checked(const MapExpr& H, double p, int order,
                             unsigned precision_bits);

nlohmann::json orbit_to_json(const PeriodicOrbit& o);
nlohmann::json certificate_to_json(const CertificateReport& r);

} // namespace circlemap

#endif
