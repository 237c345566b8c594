#include "circlemap/metrize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "circlemap/parallel.hpp"

namespace circlemap {

double weighted_deriv(const MapExpr& H, const Density& rho, double x, int k) {
    auto [v, d] = iterate_with_deriv(H, x, k);
    return rho.value(frac(v)) / rho.value(x) * d;
}

namespace {

/// Dense linear solve with partial pivoting (well systems are small and
/// strongly diagonal-dominant).
std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
    size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12)
            fail(ErrorCode::ConstructionFailed, "singular well system");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (size_t r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (size_t c = r + 1; c < n; ++c) acc -= A[r][c] * x[c];
        x[r] = acc / A[r][r];
    }
    return x;
}

std::vector<double> parabolic_points_of(const std::vector<PeriodicOrbit>& par) {
    std::vector<double> pts;
    for (const auto& o : par)
        for (double p : o.points) pts.push_back(p);
    std::sort(pts.begin(), pts.end());
    return pts;
}

double min_gap_to_others(const std::vector<double>& all, double c) {
    double m = 0.5;
    for (double x : all) {
        double d = circle_dist(x, c);
        if (d > 1e-13) m = std::min(m, d);
    }
    return m;
}

} // namespace

AdmissibleDensityReport build_admissible_density(
    const MapExpr& H, const std::vector<PeriodicOrbit>& par,
    const AdmissibleDensityOptions& opt) {
    AdmissibleDensityReport rep;
    if (par.empty()) {
        rep.rho = Density::constant(1.0);
        rep.eta = 1.0;
        rep.min_value = rep.max_value = 1.0;
        rep.rho0 = 0.0;
        rep.delta0 = 0.0;
        return rep;
    }
    std::vector<double> parpts = parabolic_points_of(par);
    int levels = std::max(opt.strata_levels, opt.floor_levels);
    auto strata = preimage_strata(H, parpts, levels);

    // rho_0 = min DH^k over the floor strata (k >= 1)
    double rho0 = 1e300;
    for (int k = 1; k <= opt.floor_levels; ++k)
        for (double x : strata[static_cast<size_t>(k)].points)
            rho0 = std::min(rho0, iterate_with_deriv(H, x, k).second);
    if (!(rho0 > 0.0)) fail(ErrorCode::ConstructionFailed, "vanishing derivative on strata");
    rep.rho0 = rho0;
    double target = std::min(rho0, 2.0) / 4.0;
    rep.target = target;

    std::vector<double> centers;
    for (int k = 1; k <= opt.strata_levels; ++k)
        for (double x : strata[static_cast<size_t>(k)].points) centers.push_back(x);
    rep.wells = static_cast<int>(centers.size());

    std::vector<double> specials = centers;
    specials.insert(specials.end(), parpts.begin(), parpts.end());

    double width_scale = 1.0;
    for (int attempt = 0; attempt <= opt.retries; ++attempt, width_scale *= 2.0) {
        rep.retries_used = attempt;
        std::vector<WellSpec> wells(centers.size());
        for (size_t j = 0; j < centers.size(); ++j) {
            // Wide wells shorten the expansion horizon (the shoulder lands
            // farther from the parabolic point), so only the distance to the
            // parabolic set and moderate neighbor overlap constrain them.
            double half_gap = 0.5 * min_gap_to_others(specials, centers[j]);
            double to_par = 0.5;
            for (double p : parpts) to_par = std::min(to_par, circle_dist(p, centers[j]));
            double hg = std::min({0.5 * to_par, 4.0 * half_gap, 0.125});
            double pi_hg = scalar_traits<double>::pi() * hg;
            double q = width_scale * std::log(1.0 / opt.tail) / (pi_hg * pi_hg);
            wells[j] = {centers[j], 0.0, std::max(4L, static_cast<long>(std::ceil(q)))};
        }

        // Depths: make rho equal the target exactly at each center.
        {
            auto probe = make_well_density(parpts, opt.beta, wells);  // depths 0: bump only
            size_t n = centers.size();
            std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
            std::vector<double> rhs(n, 0.0);
            for (size_t j = 0; j < n; ++j)
                rhs[j] = probe->value(centers[j]) - target;
            for (size_t i = 0; i < n; ++i) {
                std::vector<WellSpec> unit = {{centers[i], 1.0, wells[i].q}};
                auto one = make_well_density(parpts, 0.0, unit);
                for (size_t j = 0; j < n; ++j)
                    A[j][i] = 1.0 - one->value(centers[j]);  // U_i(c_j)
            }
            std::vector<double> depth;
            try {
                depth = solve_dense(std::move(A), std::move(rhs));
            } catch (const Error&) {
                continue;  // tighten and retry
            }
            bool sane = true;
            for (double dd : depth)
                if (!(dd > 0.0) || dd > 4.0) sane = false;
            if (!sane) continue;
            for (size_t j = 0; j < n; ++j) wells[j].depth = depth[j];
        }

        auto rho = make_well_density(parpts, opt.beta, wells);

        // (iii) 0 < rho < 2 on the verification grid
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < opt.verify_grid; ++i) {
            double v = rho->value<double>(static_cast<double>(i) / opt.verify_grid);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (double c : centers) {
            double v = rho->value<double>(c);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (!(lo > 1e-6 && hi < 2.0)) continue;

        // (i) value 1, flat, strictly convex at parabolic points
        bool prop_i = true;
        for (double p : parpts) {
            Series<double> s = rho->series_at(p, 2);
            if (std::abs(s[0] - 1.0) > 1e-9 || std::abs(s[1]) > 1e-7 || !(s[2] > 0.0))
                prop_i = false;
        }
        if (!prop_i) continue;

        // (A1) on punctured neighborhoods, shrinking delta0 when needed.  The
        // increase rho(H(x)) - rho(x) decays like r^{2n+2} toward the
        // parabolic point, so strictness is only resolvable in doubles at
        // moderate radii; below that we accept equality within rounding.
        double delta0 = 0.05;
        for (double p : parpts)
            delta0 = std::min(delta0, 0.5 * min_gap_to_others(specials, p));
        const double band = 64.0 * std::numeric_limits<double>::epsilon();
        bool a1 = false;
        while (delta0 > 1e-6) {
            a1 = true;
            for (double p : parpts) {
                for (int i = 0; i < 24 && a1; ++i) {
                    double r = delta0 * std::pow(0.5, i * 0.75);
                    for (double sgn : {1.0, -1.0}) {
                        double x = frac(p + sgn * r);
                        double inc = rho->value<double>(frac(H.eval(x))) -
                                     rho->value<double>(x);
                        bool strict_needed = i < 8;
                        if ((strict_needed && !(inc > 0.0)) || inc < -band) {
                            a1 = false;
                            break;
                        }
                    }
                }
            }
            if (a1) break;
            delta0 *= 0.5;
        }
        if (!a1) continue;

        // (A2) at every computed stratum point
        bool a2 = true;
        for (int k = 1; k <= levels && a2; ++k)
            for (double x : strata[static_cast<size_t>(k)].points)
                if (!(weighted_deriv(H, *rho, x, k) >= 2.0 - 1e-9)) {
                    a2 = false;
                    break;
                }
        if (!a2) continue;

        rep.rho = rho;
        rep.delta0 = delta0;
        rep.min_value = lo;
        rep.max_value = hi;
        rep.eta = lo / hi;
        return rep;
    }
    fail(ErrorCode::ConstructionFailed,
         "admissible density verification kept failing; raise strata levels or retries");
}

MapPtr adjustment_diffeo(const std::vector<double>& xs,
                         const std::vector<double>& ys, double eps) {
    if (xs.empty() || xs.size() != ys.size())
        fail(ErrorCode::BadInput, "anchor/target size mismatch");
    size_t n = xs.size();
    double delta;
    if (n == 1) {
        delta = eps;
    } else {
        double m = 1.0 + xs.front() - xs.back();
        for (size_t i = 0; i + 1 < n; ++i) m = std::min(m, xs[i + 1] - xs[i]);
        delta = m * eps / (static_cast<double>(n) * static_cast<double>(n));
    }
    for (size_t j = 0; j < n; ++j)
        if (!(std::abs(ys[j] - xs[j]) < delta))
            fail(ErrorCode::TargetsTooFar,
                 "|y_j - x_j| must stay below " + std::to_string(delta));
    return MapExpr::adjustment(xs, ys);
}

int find_horizon(const MapExpr& H, const Density& rho,
                 const std::vector<double>& par_points, const HorizonOptions& opt) {
    auto near_par = [&par_points, &opt](double x) {
        for (double p : par_points)
            if (circle_dist(x, p) <= opt.eps_par) return true;
        return false;
    };
    for (int N = 1; N <= opt.max_horizon; ++N) {
        bool ok = true;
        for (int i = 0; i < opt.grid && ok; ++i) {
            double x = static_cast<double>(i) / opt.grid;
            double w = weighted_deriv(H, rho, x, N);
            if (near_par(x)) {
                if (!(w >= 1.0 - opt.inside_tol)) ok = false;
            } else {
                if (!(w > 1.0)) ok = false;
            }
        }
        if (ok) return N;
    }
    fail(ErrorCode::HorizonNotFound,
         "no expansion horizon within the budget; density inadequate or map "
         "not weakly expanding");
}

DensityPtr rho_star(MapPtr H, DensityPtr rho, int N) { return make_rho_star(H, rho, N); }

MapPtr metrizing_conjugacy(DensityPtr density, double quad_tol) {
    if (!(density->floor() > 0.0))
        fail(ErrorCode::QuadratureFailure, "density must be positive");
    return MapExpr::quadrature_diffeo(std::move(density), quad_tol);
}

namespace {

template <class F>
auto stage(const char* name, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
    }
}

} // namespace

MetrizationResult metrize(MapPtr H, const MetrizeOptions& opt) {
    MetrizationResult out;
    MetrizationReport& rep = out.report;

    rep.tdstar = stage("certify", [&] {
        return certify_Tdstar(*H, opt.max_period, opt.orbit_grid, opt.orbit);
    });
    if (!rep.tdstar.certified)
        fail(ErrorCode::HypothesisViolated,
             "stage certify: map is not weakly expanding (" +
                 rep.tdstar.failure_reason + ")");

    std::vector<PeriodicOrbit> par;
    for (const auto& o : rep.tdstar.orbits)
        if (o.cls == OrbitClass::Parabolic) par.push_back(o);

    rep.regime = par.empty() ? "uniform" : "parabolic";
    rep.density = stage("density", [&] {
        return build_admissible_density(*H, par, opt.density);
    });
    out.rho = rep.density.rho;
    rep.eta = rep.density.eta;

    std::vector<double> parpts;
    for (const auto& o : par)
        for (double p : o.points) parpts.push_back(p);

    HorizonOptions hopt = opt.horizon;
    hopt.eps_par = std::min(hopt.eps_par, opt.eps_par);
    int N = stage("horizon", [&] { return find_horizon(*H, *out.rho, parpts, hopt); });

    for (int attempt = 0;; ++attempt) {
        rep.horizon = N;
        out.rho_star = stage("rho_star", [&] { return make_rho_star(H, out.rho, N); });
        out.phi = stage("conjugator", [&] {
            return metrizing_conjugacy(out.rho_star, opt.quad_tol);
        });
        out.g = stage("conjugate", [&] { return conjugate(out.phi, H); });

        // certificate scan in the image coordinate
        rep.grid = opt.grid;
        rep.eps_par = opt.eps_par;
        rep.par_images.clear();
        rep.local_minima.assign(parpts.size(), 1e300);
        for (double p : parpts) rep.par_images.push_back(frac(out.phi->eval(p)));

        const MapExpr& g = *out.g;
        int threads = std::max(1, opt.threads);
        struct Acc {
            double min_all = 1e300, max_all = -1e300, min_off = 1e300;
            std::vector<double> local;
        };
        std::vector<Acc> accs(static_cast<size_t>(threads));
        for (auto& a : accs) a.local.assign(rep.par_images.size(), 1e300);
        std::atomic<int> next_acc{0};
        parallel_for(opt.grid, threads, [&](long lo, long hi) {
            Acc& a = accs[static_cast<size_t>(next_acc++)];
            for (long i = lo; i < hi; ++i) {
                double y = static_cast<double>(i) / opt.grid;
                double dg = g.deriv(y);
                a.min_all = std::min(a.min_all, dg);
                a.max_all = std::max(a.max_all, dg);
                bool off = true;
                for (size_t pi = 0; pi < rep.par_images.size(); ++pi) {
                    if (circle_dist(y, rep.par_images[pi]) <= opt.eps_par) {
                        off = false;
                        a.local[pi] = std::min(a.local[pi], dg);
                    }
                }
                if (off) a.min_off = std::min(a.min_off, dg);
            }
        });
        double min_all = 1e300, max_all = -1e300, min_off = 1e300;
        for (const auto& a : accs) {
            min_all = std::min(min_all, a.min_all);
            max_all = std::max(max_all, a.max_all);
            min_off = std::min(min_off, a.min_off);
            for (size_t pi = 0; pi < rep.local_minima.size(); ++pi)
                rep.local_minima[pi] = std::min(rep.local_minima[pi], a.local[pi]);
        }
        rep.min_dg = min_all;
        rep.max_dg = max_all;
        rep.min_dg_off_par = min_off;

        // conjugator identity residual: Dg(phi(x)) = |Dh(x)|_{rho*}
        double resid = 0.0, phi_resid = 0.0;
        const MapExpr& phi = *out.phi;
        const Density& rs = *out.rho_star;
        for (int i = 0; i < opt.residual_samples; ++i) {
            double x = (i + 0.5) / opt.residual_samples;
            double lhs = g.deriv(phi.eval(x));
            auto [hx, dhx] = H->eval_with_deriv(x);
            double rhs = rs.value<double>(frac(hx)) / rs.value<double>(x) * dhx;
            resid = std::max(resid, std::abs(lhs - rhs));
            phi_resid = std::max(phi_resid,
                                 std::abs(phi.eval(x + 1.0) - phi.eval(x) - 1.0));
        }
        rep.conjugator_residual = resid;
        rep.phi_periodicity_residual = phi_resid;

        rep.expanding_certificate = (min_off > 1.0) && (min_all >= 1.0 - 1e-6);
        if (rep.expanding_certificate || attempt >= 2 || N >= hopt.max_horizon) break;
        ++N;  // the horizon property holds for larger N as well; retry once or twice
    }
    return out;
}

nlohmann::json metrization_report_to_json(const MetrizationReport& r) {
    nlohmann::json j;
    j["horizon"] = r.horizon;
    j["eta"] = r.eta;
    j["regime"] = r.regime;
    j["min_dg"] = r.min_dg;
    j["max_dg"] = r.max_dg;
    j["min_dg_off_par"] = r.min_dg_off_par;
    j["par_images"] = r.par_images;
    j["local_minima"] = r.local_minima;
    j["conjugator_residual"] = r.conjugator_residual;
    j["phi_periodicity_residual"] = r.phi_periodicity_residual;
    j["grid"] = r.grid;
    j["eps_par"] = r.eps_par;
    j["expanding_certificate"] = r.expanding_certificate;
    j["density"] = {{"rho0", r.density.rho0},
                    {"target", r.density.target},
                    {"delta0", r.density.delta0},
                    {"eta", r.density.eta},
                    {"min", r.density.min_value},
                    {"max", r.density.max_value},
                    {"wells", r.density.wells},
                    {"retries", r.density.retries_used},
                    {"spec", r.density.rho ? r.density.rho->spec() : nlohmann::json()}};
    j["tdstar"] = certificate_to_json(r.tdstar);
    return j;
}

} // namespace circlemap
