#ifndef CIRCLEMAP_INTERVAL_HPP
#define CIRCLEMAP_INTERVAL_HPP

#include <cmath>

#include "circlemap/scalars.hpp"

namespace circlemap {

/// Open arc (start, start+length) on R/Z, 0 < length < 1.
struct Arc {
    double start = 0.0;   // representative in [0,1)
    double length = 0.0;

    double end() const { return frac(start + length); }
    double midpoint() const { return frac(start + 0.5 * length); }

    bool contains(double x) const {
        double off = frac(x - start);
        return off > 0.0 && off < length;
    }
    bool contains_closed(double x, double tol = 0.0) const {
        double off = frac(x - start);
        return (off >= -tol && off <= length + tol) || off >= 1.0 - tol;
    }

    /// Point at relative position u in (0,1).
    double at(double u) const { return frac(start + u * length); }

    static Arc from_endpoints(double a, double b) {
        Arc r;
        r.start = frac(a);
        r.length = frac(b - a);
        return r;
    }
};

inline bool arcs_overlap(const Arc& a, const Arc& b) {
    return a.contains(b.start) || b.contains(a.start) ||
           frac(b.start - a.start) == 0.0;
}

/// Overlap test that ignores endpoint touching within tol (open arcs).
inline bool arcs_overlap_open(const Arc& a, const Arc& b, double tol) {
    auto inside = [tol](const Arc& c, double x) {
        double off = frac(x - c.start);
        return off > tol && off < c.length - tol;
    };
    if (inside(a, b.start) || inside(a, b.end())) return true;
    if (inside(b, a.start) || inside(b, a.end())) return true;
    // identical-start case: containment without endpoints inside
    double d = circle_dist(a.start, b.start);
    if (d <= tol && std::min(a.length, b.length) > 2 * tol) return true;
    return false;
}

} // namespace circlemap

#endif
