#include "circlemap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace circlemap {

double distortion(const MapExpr& H, const Arc& J, int n, int grid) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= grid; ++i) {
        double u = (i + 0.5) / (grid + 1);  // interior samples
        double x = J.at(u);
        double d = iterate_with_deriv(H, x, n).second;
        if (!(d > 0.0)) fail(ErrorCode::NotADiffeo, "nonpositive derivative along iterate");
        double l = std::log(d);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    return hi - lo;
}

double total_variation_log_deriv(const MapExpr& H, int start_grid, int max_grid) {
    auto tv = [&H](int g) {
        double prev = std::log(H.deriv(0.0));
        double first = prev;
        double acc = 0.0;
        for (int i = 1; i < g; ++i) {
            double cur = std::log(H.deriv(static_cast<double>(i) / g));
            acc += std::abs(cur - prev);
            prev = cur;
        }
        acc += std::abs(first - prev);  // periodic closure
        return acc;
    };
    double v = tv(start_grid);
    for (int g = 2 * start_grid; g <= max_grid; g *= 2) {
        double v2 = tv(g);
        if (std::abs(v2 - v) <= 0.01 * std::max(v2, 1e-12)) return v2;
        v = v2;
    }
    fail(ErrorCode::NotConverged, "total variation did not stabilize at max grid");
}

NiceInterval build_nice_interval(const MapExpr& H, double z0,
                                 const std::vector<double>& orbit, int n) {
    std::vector<double> pts = orbit;
    for (int level = 0; level < n; ++level) {
        std::vector<double> next;
        for (double t : pts)
            for (double x : preimages_of_point(H, t)) next.push_back(x);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end(),
                               [](double a, double b) { return circle_dist(a, b) < 1e-12; }),
                   next.end());
        pts = std::move(next);
    }
    // Preimage sets are nested once the orbit is included, but keep the union
    // with the generating orbit explicit for depth 0.
    for (double t : orbit) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](double a, double b) { return circle_dist(a, b) < 1e-12; }),
              pts.end());
    if (pts.empty()) fail(ErrorCode::BadInput, "empty generating set");

    double zf = frac(z0);
    for (double p : pts)
        if (circle_dist(p, zf) < 1e-12)
            fail(ErrorCode::PointOnBoundary, "z0 lies in the preimage set");

    size_t idx = pts.size() - 1;  // component wrapping around 1 by default
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i] < zf && zf < pts[i + 1]) {
            idx = i;
            break;
        }
    }
    NiceInterval out;
    if (idx + 1 < pts.size())
        out.arc = Arc::from_endpoints(pts[idx], pts[idx + 1]);
    else
        out.arc = Arc::from_endpoints(pts.back(), pts.front() + 1.0);
    out.generator_orbit = orbit;
    out.depth = n;
    return out;
}

std::pair<int, double> first_entry(const MapExpr& H, const Arc& A, double x,
                                   int max_steps) {
    double y = frac(x);
    for (int k = 1; k <= max_steps; ++k) {
        y = frac(H.eval(y));
        if (A.contains(y)) return {k, y};
    }
    fail(ErrorCode::NoEntry, "no entry into the interval within the step budget");
}

namespace {

/// The degree-many pullback arcs of Q under H (H monotone lift, DH > 0).
std::vector<Arc> pullback_arcs(const MapExpr& H, const Arc& Q) {
    int d = H.degree();
    double h0 = H.eval(0.0);
    double a = Q.start;
    double c = std::ceil(h0 - a);
    std::vector<Arc> out;
    for (int m = 0; m < d; ++m) {
        double ys = a + c + m;
        if (ys < h0) ys += 1.0;
        if (ys >= h0 + d) ys -= 1.0;
        double ye = ys + Q.length;
        auto solve = [&](double y) {
            double lo = 0.0, hi = 1.0 + 1e-9;
            // target can slightly exceed H(1) when Q wraps past the seam
            double fl = h0 - y, fh = H.eval(hi) - y;
            int guard = 0;
            while (fh < 0.0 && guard++ < 3) {
                hi += 0.5;
                fh = H.eval(hi) - y;
            }
            return solve_increasing<double>(
                [&](double u) { return H.eval(u) - y; },
                [&](double u) { return H.deriv(u); }, lo, hi, fl, fh, 1e-3,
                1e-13 * (1.0 + std::abs(y)), 200);
        };
        double xs = solve(ys);
        double xe = solve(ye);
        Arc P;
        P.start = frac(xs);
        P.length = xe - xs;
        if (P.length > 0.0) out.push_back(P);
    }
    return out;
}

} // namespace

std::vector<ReturnBranch> return_branches(const MapExpr& H, const Arc& A,
                                          int time_cap, int deriv_grid,
                                          double min_length) {
    std::vector<ReturnBranch> out;
    std::deque<std::pair<Arc, int>> work;  // arcs disjoint from A, with entry time
    work.emplace_back(A, 0);
    while (!work.empty()) {
        auto [Q, k] = work.front();
        work.pop_front();
        if (k >= time_cap) continue;
        for (const Arc& P : pullback_arcs(H, Q)) {
            if (P.length < min_length) continue;
            bool inside = A.contains(P.midpoint());
            ReturnBranch b;
            b.domain = P;
            b.entry_time = k + 1;
            b.inside = inside;
            double lo = 1e300, hi = -1e300;
            for (int i = 0; i <= deriv_grid; ++i) {
                double u = (i + 0.5) / (deriv_grid + 1);
                double d = iterate_with_deriv(H, P.at(u), k + 1).second;
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            b.min_deriv = lo;
            b.max_deriv = hi;
            out.push_back(b);
            if (!inside && !arcs_overlap_open(P, A, 1e-13))
                work.emplace_back(P, k + 1);
        }
    }
    std::sort(out.begin(), out.end(), [](const ReturnBranch& a, const ReturnBranch& b) {
        if (a.entry_time != b.entry_time) return a.entry_time < b.entry_time;
        return a.domain.start < b.domain.start;
    });
    return out;
}

bool iterates_disjoint(const MapExpr& H, const Arc& J, int n, double tol) {
    std::vector<Arc> arcs;
    double a = J.start, b = J.start + J.length;
    arcs.push_back(J);
    for (int i = 1; i < n; ++i) {
        a = H.eval(a);
        b = H.eval(b);
        double len = b - a;
        if (len >= 1.0) return false;
        Arc im;
        im.start = frac(a);
        im.length = len;
        arcs.push_back(im);
    }
    for (size_t i = 0; i < arcs.size(); ++i)
        for (size_t j = i + 1; j < arcs.size(); ++j)
            if (arcs_overlap_open(arcs[i], arcs[j], tol)) return false;
    return true;
}

double check_derivative_floor(const MapExpr& H, int grid, int k_max) {
    double floor_val = 1e300;
    for (int i = 0; i < grid; ++i) {
        double x = static_cast<double>(i) / grid;
        double prod = 1.0;
        for (int k = 1; k <= k_max; ++k) {
            auto [v, d] = H.eval_with_deriv(x);
            prod *= d;
            x = v;
            floor_val = std::min(floor_val, prod);
        }
    }
    return floor_val;
}

} // namespace circlemap
