#include "circlemap/density.hpp"

#include <cmath>

#include "circlemap/map_expr.hpp"

namespace circlemap {

namespace {

struct WellParams {
    std::vector<double> parabolic;
    double beta;
    std::vector<WellSpec> wells;
};

template <class T>
T int_pow(T base, long e) {
    T r(1);
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

template <class T>
T well_value(const WellParams& wp, const T& x) {
    T pi = scalar_traits<T>::pi();
    T v(1);
    T bump(1);
    for (double p : wp.parabolic) {
        T s = sin(pi * (x - T(p)));
        bump = bump * s * s;
    }
    v += T(wp.beta) * bump;
    for (const auto& w : wp.wells) {
        T factor(1);
        for (double p : wp.parabolic) {
            T s = sin(pi * (x - T(p)));
            T sn = sin(pi * (T(w.center) - T(p)));
            T ratio = s / sn;
            T r2 = ratio * ratio;
            factor = factor * r2 * r2;
        }
        T c = cos(pi * (x - T(w.center)));
        factor = factor * int_pow(c * c, w.q);
        v -= T(w.depth) * factor;
    }
    return v;
}

/// sin(pi (x - a)) as a series at p (closed-form trigonometric derivatives).
template <class T>
Series<T> sin_shift_series(const T& p, double a, int order) {
    T pi = scalar_traits<T>::pi();
    Series<T> s(order);
    T arg = pi * (p - T(a));
    T wj(1), factj(1);
    for (int j = 0; j <= order; ++j) {
        if (j > 0) {
            wj = wj * pi;
            factj = factj * T(j);
        }
        s[j] = wj / factj * sin(arg + T(j) * pi / T(2));
    }
    return s;
}

template <class T>
Series<T> well_series(const WellParams& wp, const T& p, int order) {
    T pi = scalar_traits<T>::pi();
    Series<T> v = Series<T>::constant(T(1), order);
    Series<T> bump = Series<T>::constant(T(1), order);
    for (double q : wp.parabolic) {
        Series<T> s = sin_shift_series(p, q, order);
        bump = bump * s * s;
    }
    v += T(wp.beta) * bump;
    for (const auto& w : wp.wells) {
        Series<T> factor = Series<T>::constant(T(1), order);
        for (double q : wp.parabolic) {
            Series<T> s = sin_shift_series(p, q, order);
            T sn = sin(pi * (T(w.center) - T(q)));
            Series<T> ratio = (T(1) / sn) * s;
            Series<T> r2 = ratio * ratio;
            factor = factor * r2 * r2;
        }
        // cos(pi (x - c)) = sin(pi (x - c) + pi/2): shift the anchor by -1/2.
        Series<T> c = sin_shift_series(p, w.center - 0.5, order);
        factor = factor * (c * c).pow_int(w.q);
        v = v - T(w.depth) * factor;
    }
    return v;
}

} // namespace

DensityPtr make_well_density(std::vector<double> parabolic_points, double beta,
                             std::vector<WellSpec> wells) {
    auto wp = std::make_shared<WellParams>(
        WellParams{std::move(parabolic_points), beta, std::move(wells)});
    nlohmann::json spec;
    spec["kind"] = "wells";
    spec["parabolic"] = wp->parabolic;
    spec["beta"] = wp->beta;
    auto warr = nlohmann::json::array();
    for (const auto& w : wp->wells)
        warr.push_back({{"center", w.center}, {"depth", w.depth}, {"q", w.q}});
    spec["wells"] = warr;

    // declared bounds from a scan (refined by the caller's verification)
    double lo = 1e9, hi = -1e9;
    const int scan = 1 << 12;
    for (int i = 0; i < scan; ++i) {
        double v = well_value(*wp, static_cast<double>(i) / scan);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (const auto& w : wp->wells) {
        double v = well_value(*wp, w.center);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    return std::make_shared<Density>(
        [wp](double x) { return well_value(*wp, x); },
        [wp](const BigFloat& x) { return well_value(*wp, x); },
        [wp](double p, int order) { return well_series(*wp, p, order); },
        [wp](const BigFloat& p, int order) { return well_series(*wp, p, order); },
        lo, hi, std::move(spec));
}

namespace {

template <class T>
T rho_star_value(const MapExpr& H, const Density& rho, int N, const T& x) {
    T acc = rho.value(x);
    T v = x, d = T(1);
    for (int j = 1; j < N; ++j) {
        auto [nv, nd] = H.eval_with_deriv(v);
        v = nv;
        d = d * nd;
        acc += rho.value(v) * d;
    }
    return acc;
}

template <class T>
Series<T> rho_star_series(const MapExpr& H, const Density& rho, int N,
                          const T& p, int order) {
    int m = order + 1;
    Series<T> cur = Series<T>::variable(p, m);
    Series<T> acc = rho.series_at(p, order);
    for (int j = 1; j < N; ++j) {
        Series<T> outer = H.series_at(cur[0], m);
        Series<T> inner = cur;
        inner[0] = T(0);
        cur = outer.compose(inner);
        Series<T> rho_here = rho.series_at(cur[0], m);
        Series<T> centered = cur;
        centered[0] = T(0);
        acc += (rho_here.compose(centered)).truncated(order) * cur.derivative().truncated(order);
    }
    return acc;
}

} // namespace

DensityPtr make_rho_star(MapPtr H, DensityPtr rho, int N) {
    if (N < 1) fail(ErrorCode::BadInput, "rho_star needs N >= 1");
    nlohmann::json spec;
    spec["kind"] = "rho_star";
    spec["base"] = rho->spec();
    spec["map"] = H->to_json();
    spec["N"] = N;

    double lo = 1e18, hi = -1e18;
    const int scan = 1 << 12;
    for (int i = 0; i < scan; ++i) {
        double v = rho_star_value(*H, *rho, N, static_cast<double>(i) / scan);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    return std::make_shared<Density>(
        [H, rho, N](double x) { return rho_star_value(*H, *rho, N, x); },
        [H, rho, N](const BigFloat& x) { return rho_star_value(*H, *rho, N, x); },
        [H, rho, N](double p, int order) { return rho_star_series(*H, *rho, N, p, order); },
        [H, rho, N](const BigFloat& p, int order) { return rho_star_series(*H, *rho, N, p, order); },
        lo, hi, std::move(spec), OrbitSumForm{H, rho, N});
}

DensityPtr density_from_json(const nlohmann::json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "const") return Density::constant(j.at("value").get<double>());
    if (kind == "wells") {
        std::vector<WellSpec> wells;
        for (const auto& w : j.at("wells"))
            wells.push_back({w.at("center").get<double>(), w.at("depth").get<double>(),
                             w.at("q").get<long>()});
        return make_well_density(j.at("parabolic").get<std::vector<double>>(),
                                 j.at("beta").get<double>(), std::move(wells));
    }
    if (kind == "rho_star") {
        return make_rho_star(MapExpr::from_json(j.at("map")),
                             density_from_json(j.at("base")), j.at("N").get<int>());
    }
    fail(ErrorCode::BadInput, "unknown density kind '" + kind + "'");
}

} // namespace circlemap
