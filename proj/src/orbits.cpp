#include "circlemap/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace circlemap {

namespace {

double ipow(int b, int e) {
    double r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

struct Displacement {
    const MapExpr& H;
    int s;
    double value(double x) const { return iterate_with_deriv(H, x, s).first - x; }
    double deriv(double x) const { return iterate_with_deriv(H, x, s).second - 1.0; }
};

/// Bisection on a sign-change bracket of a continuous function.
template <class F>
double bisect_root(F f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int i = 0; i < 90 && b - a > 1e-16 * (1.0 + std::abs(a)); ++i) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    return 0.5 * (a + b);
}

struct Cell {
    double a, b, va, vb;
};

} // namespace

std::vector<double> periodic_points(const MapExpr& H, int s, int grid) {
    int d = H.degree();
    double span = ipow(d, s) - 1.0;
    int min_grid = static_cast<int>(std::min(4.0 * (span + 1.0), 1e7));
    grid = std::max(grid, min_grid);

    Displacement disp{H, s};
    std::vector<Cell> cells;
    cells.reserve(static_cast<size_t>(grid));
    std::vector<double> vals(static_cast<size_t>(grid) + 1);
    for (int i = 0; i <= grid; ++i)
        vals[static_cast<size_t>(i)] = disp.value(static_cast<double>(i) / grid);
    for (int i = 0; i < grid; ++i)
        cells.push_back({static_cast<double>(i) / grid,
                         static_cast<double>(i + 1) / grid,
                         vals[static_cast<size_t>(i)], vals[static_cast<size_t>(i + 1)]});

    // Subdivide until each cell's displacement varies by less than 1/2, so no
    // integer level can be crossed twice inside a cell unnoticed.
    long splits = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
        Cell c = cells[i];
        if (std::abs(c.vb - c.va) > 0.5) {
            if (++splits > 4L * grid + (1L << 22))
                fail(ErrorCode::ResolutionTooCoarse, "cell subdivision diverges");
            double m = 0.5 * (c.a + c.b);
            double vm = disp.value(m);
            cells[i] = {c.a, m, c.va, vm};
            cells.push_back({m, c.b, vm, c.vb});
            --i;  // re-examine the shrunk cell
        }
    }

    std::vector<double> roots;
    auto add_root = [&roots](double x) {
        double xf = frac(x);
        for (double r : roots)
            if (circle_dist(r, xf) < 5e-12) return;
        roots.push_back(xf);
    };

    for (const Cell& c : cells) {
        long mlo = static_cast<long>(std::ceil(std::min(c.va, c.vb) - 1e-9));
        long mhi = static_cast<long>(std::floor(std::max(c.va, c.vb) + 1e-9));
        for (long m = mlo; m <= mhi; ++m) {
            double fa = c.va - static_cast<double>(m);
            double fb = c.vb - static_cast<double>(m);
            if (fa == 0.0) {
                add_root(c.a);
                continue;
            }
            if (fb == 0.0) continue;  // owned by the next cell's left endpoint
            if ((fa < 0.0) != (fb < 0.0)) {
                double md = static_cast<double>(m);
                add_root(bisect_root([&](double x) { return disp.value(x) - md; },
                                     c.a, c.b, fa, fb));
            } else if (std::min(std::abs(fa), std::abs(fb)) < 0.25) {
                // Possible tangency: look for an interior extremum of the
                // displacement and test whether it touches the level.
                double da = disp.deriv(c.a), db = disp.deriv(c.b);
                if ((da < 0.0) != (db < 0.0)) {
                    double xe = bisect_root([&](double x) { return disp.deriv(x); },
                                            c.a, c.b, da, db);
                    if (std::abs(disp.value(xe) - static_cast<double>(m)) < 1e-9)
                        add_root(xe);
                }
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

OrbitClass classify(const MapExpr& H, const std::vector<double>& pts,
                    double multiplier, const OrbitOptions& opt, int* multiplicity) {
    *multiplicity = 0;
    if (std::abs(multiplier - 1.0) > opt.class_tol)
        return multiplier > 1.0 ? OrbitClass::Repelling : OrbitClass::Attracting;
    // Borderline: resolve by an extended-precision jet of the cycle.
    PrecisionGuard guard(opt.precision_bits);
    int order = std::max(opt.jet_order, 4);
    for (int attempt = 0; attempt < 2; ++attempt) {
        Jet<BigFloat> j = cycle_jet_big(H, pts, order);
        BigFloat c1err = j.ser[1] - 1;
        if (abs(c1err) > BigFloat(1e-12))
            return c1err > 0 ? OrbitClass::Repelling : OrbitClass::Attracting;
        ExtractOptions<BigFloat> eopt;
        eopt.mult_tol = BigFloat(1e-10);
        eopt.zero_tol = BigFloat(1e-10);
        try {
            ParabolicForm<BigFloat> form = extract_parabolic_form(j, eopt);
            *multiplicity = 2 * form.n;
            return OrbitClass::Parabolic;
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InsufficientOrder && attempt == 0) {
                order *= 2;
                continue;
            }
            if (e.code() == ErrorCode::EvenLeadingOrder) {
                // Even degeneracy: one-sided attraction.  Report it as
                // parabolic with multiplicity -1; certification rejects it.
                *multiplicity = -1;
                return OrbitClass::Parabolic;
            }
            throw;
        }
    }
    fail(ErrorCode::InsufficientOrder, "could not resolve degeneracy at a neutral cycle");
}

} // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const MapExpr& H, int s, int grid,
                                                const OrbitOptions& opt) {
    std::vector<double> pts = periodic_points(H, s, grid);

    // Drop points whose minimal period properly divides s.
    std::vector<double> minimal;
    for (double p : pts) {
        bool proper = false;
        for (int t = 1; t < s && !proper; ++t) {
            if (s % t != 0) continue;
            double img = iterate_with_deriv(H, p, t).first;
            if (circle_dist(img, p) < 1e-9) proper = true;
        }
        if (!proper) minimal.push_back(p);
    }

    std::vector<PeriodicOrbit> orbits;
    std::vector<bool> used(minimal.size(), false);
    for (size_t i = 0; i < minimal.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        PeriodicOrbit o;
        o.period = s;
        double x = minimal[i];
        for (int k = 0; k < s; ++k) {
            o.points.push_back(x);
            double img = frac(iterate_with_deriv(H, x, 1).first);
            double best = img;
            for (size_t j = 0; j < minimal.size(); ++j) {
                if (circle_dist(minimal[j], img) < 1e-8) {
                    best = minimal[j];
                    used[j] = true;
                    break;
                }
            }
            x = best;
        }
        size_t arg = 0;
        for (size_t k = 1; k < o.points.size(); ++k)
            if (o.points[k] < o.points[arg]) arg = k;
        std::rotate(o.points.begin(), o.points.begin() + static_cast<long>(arg),
                    o.points.end());
        o.multiplier = iterate_with_deriv(H, o.points[0], s).second;
        o.cls = classify(H, o.points, o.multiplier, opt, &o.multiplicity);
        orbits.push_back(std::move(o));
    }
    std::sort(orbits.begin(), orbits.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  return a.points[0] < b.points[0];
              });
    return orbits;
}

std::vector<PeriodicOrbit> par_set(const MapExpr& H, int max_period, int grid,
                                   const OrbitOptions& opt) {
    std::vector<PeriodicOrbit> par;
    for (int s = 1; s <= max_period; ++s)
        for (auto& o : find_periodic_orbits(H, s, grid, opt))
            if (o.cls == OrbitClass::Parabolic) par.push_back(std::move(o));
    return par;
}

int lcm_parabolic_periods(const std::vector<PeriodicOrbit>& par) {
    long l = 1;
    for (const auto& o : par)
        if (o.cls == OrbitClass::Parabolic) l = std::lcm(l, static_cast<long>(o.period));
    return static_cast<int>(l);
}

std::vector<double> preimages_of_point(const MapExpr& H, double target) {
    int d = H.degree();
    double h0 = H.eval(0.0);
    double c = std::ceil(h0 - target);
    std::vector<double> out;
    for (int m = 0; m < d; ++m) {
        double y = target + c + m;
        if (y < h0) y += 1.0;  // rounding guard at the seam
        if (y >= h0 + d) y -= 1.0;
        double fa = h0 - y;
        double fb = h0 + d - y;
        double tol = 1e-13 * (1.0 + std::abs(y));
        double x = solve_increasing<double>(
            [&](double u) { return H.eval(u) - y; },
            [&](double u) { return H.deriv(u); }, 0.0, 1.0, fa, fb, 1e-3, tol, 200);
        out.push_back(frac(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<PreimageStratum> preimage_strata(const MapExpr& H,
                                             const std::vector<double>& par_points,
                                             int k_max) {
    if (par_points.empty()) fail(ErrorCode::BadInput, "empty parabolic set");
    std::vector<PreimageStratum> strata;
    strata.push_back({0, par_points});
    std::vector<double> seen = par_points;
    for (int k = 1; k <= k_max; ++k) {
        std::vector<double> next;
        for (double t : strata.back().points) {
            for (double x : preimages_of_point(H, t)) {
                bool fresh = true;
                for (double s : seen)
                    if (circle_dist(s, x) < 1e-10) {
                        fresh = false;
                        break;
                    }
                for (double s : next)
                    if (fresh && circle_dist(s, x) < 1e-10) {
                        fresh = false;
                        break;
                    }
                if (fresh) next.push_back(x);
            }
        }
        std::sort(next.begin(), next.end());
        strata.push_back({k, next});
        seen.insert(seen.end(), next.begin(), next.end());
    }
    return strata;
}

Jet<BigFloat> map_jet_big(const MapExpr& H, double p, int order) {
    Jet<BigFloat> j;
    j.base = BigFloat(p);
    j.ser = H.series_at(BigFloat(p), order);
    j.lift_degree = H.degree();
    return j;
}

Jet<BigFloat> cycle_jet_big(const MapExpr& H, const std::vector<double>& points,
                            int order) {
    std::vector<Jet<BigFloat>> jets;
    jets.reserve(points.size());
    for (double p : points) jets.push_back(map_jet_big(H, p, order));
    return jet_cycle_iterate(jets, 0, static_cast<int>(points.size()),
                             std::optional<BigFloat>(BigFloat(1e-8)));
}

Jet<BigFloat> jet_at_checked(const MapExpr& H, double p, int order,
                             unsigned precision_bits) {
    Series<BigFloat> lo(order), hi(order);
    {
        PrecisionGuard g(precision_bits);
        lo = H.series_at(BigFloat(p), order);
    }
    {
        PrecisionGuard g(2 * precision_bits);
        hi = H.series_at(BigFloat(p), order);
    }
    for (int i = 0; i <= order; ++i) {
        BigFloat scale = abs(hi[i]) + 1;
        if (abs(lo[i] - hi[i]) / scale > BigFloat(1e-6))
            fail(ErrorCode::PrecisionLoss,
                 "jet coefficient " + std::to_string(i) +
                     " unstable under precision doubling; raise precision bits");
    }
    Jet<BigFloat> j;
    j.base = BigFloat(p);
    j.ser = std::move(lo);
    j.lift_degree = H.degree();
    return j;
}

CertificateReport certify_Tdstar(const MapExpr& H, int max_period, int grid,
                                 const OrbitOptions& opt) {
    CertificateReport rep;
    rep.max_period = max_period;
    rep.grid = grid;
    rep.caveat = "orbits of period > " + std::to_string(max_period) +
                 " were not examined (no computable period bound)";
    check_local_diffeo(H, std::max(grid, 1 << 10));

    auto flag = [&rep](const PeriodicOrbit& o, const std::string& why) {
        if (!rep.witness) {
            rep.witness = o;
            rep.failure_reason = why;
        }
    };

    for (int s = 1; s <= max_period; ++s) {
        auto orbits = find_periodic_orbits(H, s, grid, opt);
        for (auto& o : orbits) {
            if (o.cls == OrbitClass::Attracting) {
                flag(o, "attracting orbit (multiplier " + std::to_string(o.multiplier) + ")");
            } else if (o.cls == OrbitClass::Parabolic) {
                if (o.multiplicity <= 0) {
                    flag(o, "neutral orbit with even-order degeneracy");
                } else {
                    PrecisionGuard guard(opt.precision_bits);
                    Jet<BigFloat> j = cycle_jet_big(H, o.points, o.multiplicity + 1);
                    if (!(j.ser[o.multiplicity + 1] > 0)) {
                        flag(o, "neutral orbit with nonpositive leading coefficient");
                    } else {
                        for (double r : {1e-2, 1e-3, 1e-4})
                            for (double sgn : {1.0, -1.0}) {
                                double x = o.points[0] + sgn * r;
                                double dv = iterate_with_deriv(H, x, s).second;
                                if (!(dv > 1.0 - 1e-10))
                                    flag(o, "DH^s <= 1 on a punctured neighborhood sample");
                            }
                    }
                }
            }
            rep.orbits.push_back(std::move(o));
        }
    }
    rep.certified = !rep.witness.has_value();
    return rep;
}

nlohmann::json orbit_to_json(const PeriodicOrbit& o) {
    nlohmann::json j;
    j["points"] = o.points;
    j["period"] = o.period;
    j["multiplier"] = o.multiplier;
    j["class"] = orbit_class_name(o.cls);
    if (o.cls == OrbitClass::Parabolic) j["multiplicity"] = o.multiplicity;
    return j;
}

nlohmann::json certificate_to_json(const CertificateReport& r) {
    nlohmann::json j;
    j["certified"] = r.certified;
    j["max_period"] = r.max_period;
    j["grid"] = r.grid;
    j["caveat"] = r.caveat;
    auto arr = nlohmann::json::array();
    for (const auto& o : r.orbits) arr.push_back(orbit_to_json(o));
    j["orbits"] = arr;
    if (r.witness) {
        j["witness"] = orbit_to_json(*r.witness);
        j["failure_reason"] = r.failure_reason;
    }
    return j;
}

} // namespace circlemap
