#include "circlemap/normalize.hpp"

#include <algorithm>
#include <cmath>

namespace circlemap {

MapPtr averaging_conjugacy(MapPtr H, int N) {
    if (N < 1) fail(ErrorCode::BadInput, "averaging needs N >= 1");
    return MapExpr::average_lift(std::move(H), N);
}

DerivIdentityReport verify_deriv_identity(const MapExpr& H, const MapExpr& phi,
                                          const MapExpr& Hhat, int N, int grid,
                                          const std::vector<double>& par_points,
                                          double eq_tol) {
    DerivIdentityReport rep;
    rep.grid = grid;
    rep.min_ratio = 1e300;
    for (int i = 0; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        // ratio = sum_{k=1..N} (H^k)'(x) / sum_{k=0..N-1} (H^k)'(x)
        double num = 0.0, den = 1.0, prod = 1.0, v = x;
        for (int k = 1; k <= N; ++k) {
            auto [nv, nd] = H.eval_with_deriv(v);
            v = nv;
            prod *= nd;
            num += prod;
            if (k < N) den += prod;
        }
        double ratio = num / den;
        double lhs = Hhat.deriv(phi.eval(x));
        rep.max_residual = std::max(rep.max_residual, std::abs(lhs - ratio));
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        if (ratio <= 1.0 + eq_tol) {
            double dist = 0.5;
            for (double p : par_points) dist = std::min(dist, circle_dist(x, p));
            rep.eq_locus_max_dist = std::max(rep.eq_locus_max_dist, dist);
        }
    }
    return rep;
}

namespace {

CycleNormalization normalize_cycle(const MapExpr& H2, const MapExpr& phi_total,
                                   const PeriodicOrbit& orbit,
                                   const NormalizeOptions& opt) {
    CycleNormalization cn;
    cn.orbit = orbit;
    if (orbit.multiplicity <= 0)
        fail(ErrorCode::NotParabolic, "cycle lacks an odd-order degeneracy");
    cn.n = orbit.multiplicity / 2;
    int n = cn.n;
    int order = 6 * n;

    for (double p : orbit.points) cn.points_out.push_back(frac(phi_total.eval(p)));

    PrecisionGuard guard(opt.precision_bits);
    std::vector<std::vector<BigFloat>> blocks;  // per point: c_{2n+1}..c_{6n}
    for (double q : cn.points_out) {
        Series<BigFloat> s = H2.series_at(BigFloat(q), order);
        cn.multiplier_error =
            std::max(cn.multiplier_error, std::abs(scalar_traits<BigFloat>::to_double(s[1] - 1)));
        std::vector<BigFloat> blk;
        for (int i = 2 * n + 1; i <= 6 * n; ++i) blk.push_back(s[i]);
        blocks.push_back(std::move(blk));
    }

    // P_check from the first point; spread across the cycle is the discrepancy.
    std::vector<double> pc;
    for (const auto& c : blocks[0]) pc.push_back(scalar_traits<BigFloat>::to_double(c));
    cn.P_check = Polynomial<double>(pc);
    cn.P_check_at_0 = pc.empty() ? 0.0 : pc[0];
    for (size_t k = 1; k < blocks.size(); ++k)
        for (size_t i = 0; i < blocks[k].size(); ++i)
            cn.cross_discrepancy = std::max(
                cn.cross_discrepancy,
                std::abs(scalar_traits<BigFloat>::to_double(blocks[k][i] - blocks[0][i])));
    return cn;
}

} // namespace

NormalizationResult normalize(MapPtr H, const NormalizeOptions& opt) {
    NormalizationResult out;
    auto par = par_set(*H, opt.max_period, opt.orbit_grid, opt.orbit);
    out.N = lcm_parabolic_periods(par);
    double L = 0.0, p = 1.0;
    for (int k = 0; k < out.N; ++k) {
        L += p;
        p *= H->degree();
    }
    out.L = L;

    std::vector<double> parpts;
    for (const auto& o : par)
        for (double q : o.points) parpts.push_back(q);

    out.phi0 = averaging_conjugacy(H, out.N);
    out.H1 = conjugate(out.phi0, H);
    out.step0 = verify_deriv_identity(*H, *out.phi0, *out.H1, out.N, opt.deriv_grid,
                                      parpts);

    out.phi1 = averaging_conjugacy(out.H1, out.N);
    out.H2 = conjugate(out.phi1, out.H1);

    std::vector<double> parpts1;
    for (double q : parpts) parpts1.push_back(frac(out.phi0->eval(q)));
    out.step1 = verify_deriv_identity(*out.H1, *out.phi1, *out.H2, out.N,
                                      opt.deriv_grid, parpts1);

    out.phi = MapExpr::compose({out.phi1, out.phi0});

    for (const auto& o : par) out.cycles.push_back(normalize_cycle(*out.H2, *out.phi, o, opt));
    return out;
}

nlohmann::json normalization_to_json(const NormalizationResult& r) {
    nlohmann::json j;
    j["N"] = r.N;
    j["L"] = r.L;
    j["phi0"] = r.phi0->to_json();
    j["phi1"] = r.phi1->to_json();
    j["deriv_identity"] = {
        {"step0", {{"max_residual", r.step0.max_residual},
                   {"min_ratio", r.step0.min_ratio},
                   {"eq_locus_max_dist", r.step0.eq_locus_max_dist}}},
        {"step1", {{"max_residual", r.step1.max_residual},
                   {"min_ratio", r.step1.min_ratio},
                   {"eq_locus_max_dist", r.step1.eq_locus_max_dist}}}};
    auto arr = nlohmann::json::array();
    for (const auto& c : r.cycles) {
        nlohmann::json cj;
        cj["orbit"] = orbit_to_json(c.orbit);
        cj["n"] = c.n;
        cj["points_out"] = c.points_out;
        cj["P_check"] = c.P_check.coeffs();
        cj["P_check_at_0"] = c.P_check_at_0;
        cj["cross_discrepancy"] = c.cross_discrepancy;
        cj["multiplier_error"] = c.multiplier_error;
        arr.push_back(cj);
    }
    j["cycles"] = arr;
    return j;
}

} // namespace circlemap
