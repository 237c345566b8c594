#ifndef CIRCLEMAP_GEOMETRY_HPP
#define CIRCLEMAP_GEOMETRY_HPP

#include <vector>

#include "circlemap/interval.hpp"
#include "circlemap/map_expr.hpp"
#include "circlemap/orbits.hpp"

namespace circlemap {

/// sup - inf of log DH^n over a grid on J (a lower estimate of the true
/// distortion, monotone non-decreasing in the grid).
double distortion(const MapExpr& H, const Arc& J, int n, int grid);

/// Total variation of log DH over one period, by dyadic refinement with a 1%
/// Cauchy stopping rule.  Throws NotConverged past max_grid.
double total_variation_log_deriv(const MapExpr& H, int start_grid = 1 << 10,
                                 int max_grid = 1 << 22);

struct NiceInterval {
    Arc arc;
    std::vector<double> generator_orbit;  // the periodic orbit O
    int depth = 0;                        // arc is a component of S^1 \ H^{-depth}(O)
};

/// Component of the complement of H^{-n}(O) containing z0.
NiceInterval build_nice_interval(const MapExpr& H, double z0,
                                 const std::vector<double>& orbit, int n);

/// Minimal k >= 1 with H^k(x) mod 1 in A; returns (k, H^k(x) mod 1).
std::pair<int, double> first_entry(const MapExpr& H, const Arc& A, double x,
                                   int max_steps);

struct ReturnBranch {
    Arc domain;       // component J of D(A) with entry time <= cap
    int entry_time = 0;
    bool inside = false;   // J lies inside A (a first-return branch)
    double min_deriv = 0;  // inf over J of D(H^k)
    double max_deriv = 0;
};

/// Enumerates the first-entry branches of A with entry time <= time_cap by
/// breadth-first pullback along inverse branches; pullbacks meeting A are
/// recorded and not pulled back further.
std::vector<ReturnBranch> return_branches(const MapExpr& H, const Arc& A,
                                          int time_cap, int deriv_grid = 32,
                                          double min_length = 1e-14);

/// Pairwise disjointness of J, H(J), ..., H^{n-1}(J) (open arcs).
bool iterates_disjoint(const MapExpr& H, const Arc& J, int n, double tol = 1e-13);

/// Empirical K_0: min over a grid and k <= k_max of DH^k.
double check_derivative_floor(const MapExpr& H, int grid, int k_max);

} // namespace circlemap

#endif
