#ifndef CIRCLEMAP_MAP_EXPR_HPP
#define CIRCLEMAP_MAP_EXPR_HPP

#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "circlemap/density.hpp"
#include "circlemap/errors.hpp"
#include "circlemap/quadrature.hpp"
#include "circlemap/rootfind.hpp"
#include "circlemap/series.hpp"

namespace circlemap {

class MapExpr;
using MapPtr = std::shared_ptr<const MapExpr>;

template <class T>
T two_pi() {
    return T(2) * scalar_traits<T>::pi();
}

// ---- Mobius circle rotation M_r(z) = (z+r)/(1+rz) restricted to S^1 --------
//
// Lift (fixing angle 0): mu_r(x) = x - arg(1 + r e^{2 pi i x}) / pi, which is
// real analytic, strictly increasing and satisfies mu_r(x+1) = mu_r(x) + 1.
// Its derivative is the Poisson-kernel form (1 - r^2)/(1 + 2 r cos(2 pi x) + r^2).

template <class T>
T mobius_angle(const T& r, const T& x) {
    T th = two_pi<T>() * x;
    return x - atan2(r * sin(th), T(1) + r * cos(th)) / scalar_traits<T>::pi();
}

template <class T>
T mobius_angle_deriv(const T& r, const T& x) {
    T th = two_pi<T>() * x;
    return (T(1) - r * r) / (T(1) + 2 * r * cos(th) + r * r);
}

/// Taylor series of mu_r at p, via the complex series of log(1 + r e^{i theta}).
template <class T>
Series<T> mobius_angle_series(const T& r, const T& p, int order) {
    using C = Cx<T>;
    T th0 = two_pi<T>() * p;
    // E = e^{i theta0} * exp(2 pi i t): coefficients of the exponential (zero
    // constant in the exponent, so no scalar exp is needed).
    Series<C> expo(order);
    if (order >= 1) expo[1] = C(T(0), two_pi<T>());
    Series<C> e = exp_zero_const(expo);
    C rot(cos(th0), sin(th0));
    Series<C> u(order, C(T(1)));
    for (int i = 0; i <= order; ++i) {
        C term = rot * e[i];
        u[i] = (i == 0) ? C(T(1)) + C(r) * term : C(r) * term;
    }
    // Principal log is globally smooth here: Re(u0) = 1 + r cos(th0) > 0.
    C u0 = u[0];
    C log_c0(log(u0.re * u0.re + u0.im * u0.im) / T(2), atan2(u0.im, u0.re));
    Series<C> lg = log_with_const(u, log_c0);
    Series<T> out = Series<T>::variable(p, order);
    for (int i = 0; i <= order; ++i)
        out[i] = out[i] - lg[i].im / scalar_traits<T>::pi();
    return out;
}

// ---- expression nodes -------------------------------------------------------

struct TrigLiftNode {
    int degree = 1;
    std::vector<double> cos_coeffs;  // a_k, k = 1..K
    std::vector<double> sin_coeffs;  // b_k
};

struct BlaschkePowerNode {
    int degree = 2;
    double r = 0.0;  // in (0,1); lift of z -> (M_r(z))^d
};

struct HdMapNode {
    int degree = 2;  // lift of z -> M_r(z^d) with r = (d-1)/(d+1)
};

struct ComposeNode {
    std::vector<MapPtr> parts;  // applied right to left
};

struct InverseNode {
    MapPtr inner;  // degree-1, positive derivative
};

struct AverageNode {
    MapPtr base;
    int iterates = 1;  // N; phi = (1/L) sum_{k<N} H^k, L = (d^N-1)/(d-1)
};

struct QuadratureNode {
    DensityPtr density;       // full density (derivative of the lift / C)
    MapPtr orbit_map;         // set when the density is an orbit sum
    DensityPtr base;          // the quadrature table integrand
    int orbit_terms = 1;
    std::shared_ptr<const CumulativeQuadrature> table;  // over base, one period
    std::vector<double> h0;   // orbit of 0 under orbit_map (length orbit_terms)
    double normalizer = 1.0;  // C with 1/C = integral of the density over a period
    double quad_tol = 1e-11;
};

struct AdjustmentNode {
    std::vector<double> anchors;  // x_1 < ... < x_n < x_1 + 1, in [0,1)
    std::vector<double> targets;  // y_j
};

using MapNode = std::variant<TrigLiftNode, BlaschkePowerNode, HdMapNode,
                             ComposeNode, InverseNode, AverageNode,
                             QuadratureNode, AdjustmentNode>;

template <class T>
T solve_value_tol() {
    if constexpr (std::is_same_v<T, double>)
        return T(1e-12);
    else
        return T(1024) * scalar_traits<T>::eps();
}

/// Immutable lift of a degree-d circle covering (or diffeomorphism for d = 1).
/// All evaluation is pure; instances can be shared freely across threads.
class MapExpr : public std::enable_shared_from_this<MapExpr> {
  public:
    explicit MapExpr(MapNode node);

    int degree() const { return degree_; }
    const MapNode& node() const { return node_; }

    template <class T>
    T eval(const T& x) const;

    template <class T>
    T deriv(const T& x) const;

    template <class T>
    std::pair<T, T> eval_with_deriv(const T& x) const;

    /// Taylor series of the lift at p: c0 = H(p), c1 = H'(p), ...
    template <class T>
    Series<T> series_at(const T& p, int order) const;

    /// Solve H(u) = y for a degree-1 lift; the solution is localized with the
    /// translation identity and refined by bisection + safeguarded Newton.
    template <class T>
    T invert_at(const T& y) const;

    // factories
    static MapPtr trig_lift(int degree, std::vector<double> cos_coeffs = {},
                            std::vector<double> sin_coeffs = {});
    static MapPtr blaschke_power(int degree, double r);
    static MapPtr hd_map(int degree);
    static MapPtr compose(std::vector<MapPtr> parts);
    static MapPtr inverse(MapPtr inner);
    static MapPtr average_lift(MapPtr base, int iterates);
    static MapPtr quadrature_diffeo(DensityPtr density, double quad_tol);
    static MapPtr adjustment(std::vector<double> anchors,
                             std::vector<double> targets);

    nlohmann::json to_json() const;
    static MapPtr from_json(const nlohmann::json& j);

  private:
    MapNode node_;
    int degree_;
    double value_at_zero_;  // cached H(0) for inverse localization
};

// ---- free operations --------------------------------------------------------

/// (H^n(x), DH^n(x)) with the chain-rule product of derivatives; n = 0 gives (x, 1).
template <class T>
std::pair<T, T> iterate_with_deriv(const MapExpr& H, T x, int n) {
    T d(1);
    for (int i = 0; i < n; ++i) {
        auto [v, dv] = H.eval_with_deriv(x);
        d = d * dv;
        x = v;
    }
    return {x, d};
}

/// phi o H o phi^{-1}; phi must be a degree-1 lift with Dphi > 0, verified on
/// a grid of the given size.
MapPtr conjugate(MapPtr phi, MapPtr H, int check_grid = 512);

/// Verifies DH > 0 on a uniform grid; throws NotADiffeo otherwise.
void check_local_diffeo(const MapExpr& H, int grid);

// ---- template implementations ----------------------------------------------

namespace detail {

/// Antiderivative of the 1-periodic table integrand, extended to the line.
inline double periodic_antideriv(const CumulativeQuadrature& table, double u) {
    double fl = std::floor(u);
    return fl * table.total() + table.upto(u - fl);
}

/// Integral of an orbit-sum density from 0 to x: each term integrates by the
/// substitution u = H^j(t), so only the base density is ever quadratured.
inline double orbit_antideriv(const QuadratureNode& n, double x) {
    double acc = 0.0, v = x;
    for (int j = 0; j < n.orbit_terms; ++j) {
        acc += periodic_antideriv(*n.table, v) -
               periodic_antideriv(*n.table, n.h0[static_cast<size_t>(j)]);
        if (j + 1 < n.orbit_terms) v = n.orbit_map->eval(v);
    }
    return acc;
}

template <class T>
T hd_r(int degree) {
    return T(degree - 1) / T(degree + 1);
}

template <class T>
T average_norm(int degree, int iterates) {
    // L = (d^N - 1)/(d - 1) = 1 + d + ... + d^{N-1}
    T L(0), p(1);
    for (int k = 0; k < iterates; ++k) {
        L += p;
        p = p * T(degree);
    }
    return L;
}

} // namespace detail

template <class T>
T MapExpr::eval(const T& x) const {
    return eval_with_deriv<T>(x).first;
}

template <class T>
T MapExpr::deriv(const T& x) const {
    return std::visit(
        [&](const auto& n) -> T {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                T d = T(n.degree);
                for (size_t k = 0; k < std::max(n.cos_coeffs.size(), n.sin_coeffs.size()); ++k) {
                    T w = two_pi<T>() * T(static_cast<long>(k) + 1);
                    T th = w * x;
                    if (k < n.cos_coeffs.size()) d -= T(n.cos_coeffs[k]) * w * sin(th);
                    if (k < n.sin_coeffs.size()) d += T(n.sin_coeffs[k]) * w * cos(th);
                }
                return d;
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                return T(n.degree) * mobius_angle_deriv(T(n.r), x);
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                T r = detail::hd_r<T>(n.degree);
                return T(n.degree) * mobius_angle_deriv(r, T(n.degree) * x);
            } else if constexpr (std::is_same_v<N, QuadratureNode>) {
                return T(n.normalizer) * n.density->value(x);
            } else {
                return eval_with_deriv<T>(x).second;
            }
        },
        node_);
}

template <class T>
std::pair<T, T> MapExpr::eval_with_deriv(const T& x) const {
    return std::visit(
        [&](const auto& n) -> std::pair<T, T> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                T v = T(n.degree) * x;
                T d = T(n.degree);
                for (size_t k = 0; k < std::max(n.cos_coeffs.size(), n.sin_coeffs.size()); ++k) {
                    T w = two_pi<T>() * T(static_cast<long>(k) + 1);
                    T th = w * x;
                    T s = sin(th), c = cos(th);
                    if (k < n.cos_coeffs.size()) {
                        v += T(n.cos_coeffs[k]) * c;
                        d -= T(n.cos_coeffs[k]) * w * s;
                    }
                    if (k < n.sin_coeffs.size()) {
                        v += T(n.sin_coeffs[k]) * s;
                        d += T(n.sin_coeffs[k]) * w * c;
                    }
                }
                return {v, d};
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                T r = T(n.r);
                return {T(n.degree) * mobius_angle(r, x),
                        T(n.degree) * mobius_angle_deriv(r, x)};
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                T r = detail::hd_r<T>(n.degree);
                T dx = T(n.degree) * x;
                return {mobius_angle(r, dx),
                        T(n.degree) * mobius_angle_deriv(r, dx)};
            } else if constexpr (std::is_same_v<N, ComposeNode>) {
                T v = x, d = T(1);
                for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) {
                    auto [nv, nd] = (*it)->eval_with_deriv(v);
                    v = nv;
                    d = d * nd;
                }
                return {v, d};
            } else if constexpr (std::is_same_v<N, InverseNode>) {
                T u = n.inner->invert_at(x);
                return {u, T(1) / n.inner->deriv(u)};
            } else if constexpr (std::is_same_v<N, AverageNode>) {
                T L = detail::average_norm<T>(n.base->degree(), n.iterates);
                T v = x, dprod = T(1);
                T sum_v = x, sum_d = T(1);  // j = 0 term
                for (int j = 1; j < n.iterates; ++j) {
                    auto [nv, nd] = n.base->eval_with_deriv(v);
                    v = nv;
                    dprod = dprod * nd;
                    sum_v += v;
                    sum_d += dprod;
                }
                return {sum_v / L, sum_d / L};
            } else if constexpr (std::is_same_v<N, QuadratureNode>) {
                double xf = scalar_traits<T>::to_double(x);
                T v = T(n.normalizer * detail::orbit_antideriv(n, xf));
                return {v, T(n.normalizer) * n.density->value(x)};
            } else {  // AdjustmentNode
                size_t cnt = n.anchors.size();
                T v = x, d = T(1);
                for (size_t j = 0; j < cnt; ++j) {
                    T w = T(n.targets[j]) - T(n.anchors[j]);
                    if (w == T(0)) continue;
                    // G_j(x) = prod_{i != j} sin^2(pi (x - x_i)), weight G_j(x)/G_j(x_j)
                    T gj(1), gj_at(1), gjp(0);
                    for (size_t i = 0; i < cnt; ++i) {
                        if (i == j) continue;
                        T si = sin(scalar_traits<T>::pi() * (x - T(n.anchors[i])));
                        gj = gj * si * si;
                        T sa = sin(scalar_traits<T>::pi() * (T(n.anchors[j]) - T(n.anchors[i])));
                        gj_at = gj_at * sa * sa;
                        // derivative term: pi sin(2 pi (x - x_i)) * prod_{l != i,j} sin^2
                        T term = scalar_traits<T>::pi() * sin(two_pi<T>() * (x - T(n.anchors[i])));
                        for (size_t l = 0; l < cnt; ++l) {
                            if (l == i || l == j) continue;
                            T sl = sin(scalar_traits<T>::pi() * (x - T(n.anchors[l])));
                            term = term * sl * sl;
                        }
                        gjp += term;
                    }
                    v += w * gj / gj_at;
                    d += w * gjp / gj_at;
                }
                return {v, d};
            }
        },
        node_);
}

template <class T>
Series<T> MapExpr::series_at(const T& p, int order) const {
    return std::visit(
        [&](const auto& n) -> Series<T> {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, TrigLiftNode>) {
                // closed-form trigonometric derivatives: d^j/dx^j cos(wx) at p
                // is w^j cos(wp + j pi/2), same for sin.
                Series<T> s(order);
                s[0] = T(n.degree) * p;
                if (order >= 1) s[1] = T(n.degree);
                T half_pi = scalar_traits<T>::pi() / T(2);
                for (size_t k = 0; k < std::max(n.cos_coeffs.size(), n.sin_coeffs.size()); ++k) {
                    T w = two_pi<T>() * T(static_cast<long>(k) + 1);
                    T wp = w * p;
                    T wj(1), factj(1);
                    for (int j = 0; j <= order; ++j) {
                        if (j > 0) {
                            wj = wj * w;
                            factj = factj * T(j);
                        }
                        T phase = wp + T(j) * half_pi;
                        if (k < n.cos_coeffs.size())
                            s[j] += T(n.cos_coeffs[k]) * wj / factj * cos(phase);
                        if (k < n.sin_coeffs.size())
                            s[j] += T(n.sin_coeffs[k]) * wj / factj * sin(phase);
                    }
                }
                return s;
            } else if constexpr (std::is_same_v<N, BlaschkePowerNode>) {
                return T(n.degree) * mobius_angle_series(T(n.r), p, order);
            } else if constexpr (std::is_same_v<N, HdMapNode>) {
                T r = detail::hd_r<T>(n.degree);
                Series<T> mu = mobius_angle_series(r, T(n.degree) * p, order);
                // substitute t -> d t
                T dp(1);
                for (int j = 0; j <= order; ++j) {
                    mu[j] = mu[j] * dp;
                    dp = dp * T(n.degree);
                }
                return mu;
            } else if constexpr (std::is_same_v<N, ComposeNode>) {
                Series<T> cur = Series<T>::variable(p, order);
                for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) {
                    Series<T> outer = (*it)->series_at(cur[0], order);
                    Series<T> inner = cur;
                    inner[0] = T(0);
                    cur = outer.compose(inner);
                }
                return cur;
            } else if constexpr (std::is_same_v<N, InverseNode>) {
                T q = n.inner->invert_at(p);
                Series<T> s = n.inner->series_at(q, order);
                s[0] = T(0);
                Series<T> rev = s.reversion();
                rev[0] = q;
                return rev;
            } else if constexpr (std::is_same_v<N, AverageNode>) {
                T L = detail::average_norm<T>(n.base->degree(), n.iterates);
                Series<T> cur = Series<T>::variable(p, order);
                Series<T> acc = cur;
                for (int j = 1; j < n.iterates; ++j) {
                    Series<T> outer = n.base->series_at(cur[0], order);
                    Series<T> inner = cur;
                    inner[0] = T(0);
                    cur = outer.compose(inner);
                    acc += cur;
                }
                return (T(1) / L) * acc;
            } else if constexpr (std::is_same_v<N, QuadratureNode>) {
                Series<T> ds = n.density->series_at(p, std::max(0, order - 1));
                T c0 = eval(p);
                return (T(n.normalizer) * ds).antiderivative(c0).truncated(order);
            } else {  // AdjustmentNode
                size_t cnt = n.anchors.size();
                Series<T> s = Series<T>::variable(p, order);
                for (size_t j = 0; j < cnt; ++j) {
                    T w = T(n.targets[j]) - T(n.anchors[j]);
                    if (w == T(0)) continue;
                    Series<T> gj = Series<T>::constant(T(1), order);
                    T gj_at(1);
                    for (size_t i = 0; i < cnt; ++i) {
                        if (i == j) continue;
                        // sin(pi(x - x_i)) at p + t: coefficients pi^j/j! sin(pi(p-x_i) + j pi/2)
                        Series<T> si(order);
                        T arg = scalar_traits<T>::pi() * (p - T(n.anchors[i]));
                        T wj(1), factj(1);
                        for (int jj = 0; jj <= order; ++jj) {
                            if (jj > 0) {
                                wj = wj * scalar_traits<T>::pi();
                                factj = factj * T(jj);
                            }
                            si[jj] = wj / factj * sin(arg + T(jj) * scalar_traits<T>::pi() / T(2));
                        }
                        gj = gj * si * si;
                        T sa = sin(scalar_traits<T>::pi() * (T(n.anchors[j]) - T(n.anchors[i])));
                        gj_at = gj_at * sa * sa;
                    }
                    s += (w / gj_at) * gj;
                }
                return s;
            }
        },
        node_);
}

template <class T>
T MapExpr::invert_at(const T& y) const {
    if (degree_ != 1)
        fail(ErrorCode::NotInvertible, "invert_at needs a degree-1 lift");
    if (const auto* q = std::get_if<QuadratureNode>(&node_)) {
        // phi(0) = 0 exactly, so the solution lies in [floor(y), floor(y)+1];
        // Newton with the pointwise density derivative, bisection fallback.
        double yd = scalar_traits<T>::to_double(y);
        double k0 = std::floor(yd);
        double a = k0, b = k0 + 1.0;
        double x = yd;  // the conjugator averages to the identity
        for (int i = 0; i < 80; ++i) {
            double fx = q->normalizer * detail::orbit_antideriv(*q, x) - yd;
            if (fx == 0.0) return T(x);
            (fx < 0.0 ? a : b) = x;
            double d = q->normalizer * q->density->value<double>(frac(x));
            double xn = (d > 0.0) ? x - fx / d : 0.5 * (a + b);
            if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
            if (std::abs(xn - x) <= 1e-15 * (1.0 + std::abs(x))) return T(xn);
            x = xn;
            if (b - a <= 4e-16 * (1.0 + std::abs(x))) return T(x);
        }
        return T(x);
    }
    // phi(k) = phi(0) + k, so the solution lies in [k0, k0 + 1].
    T phi0 = T(value_at_zero_);
    if constexpr (!std::is_same_v<T, double>) phi0 = eval(T(0));
    T k0 = floor(y - phi0);
    T a = k0, b = k0 + T(1);
    T fa = eval(a) - y;
    T fb = eval(b) - y;
    // Guard against rounding at the bracket edges.
    int widen = 0;
    while (fa > T(0) && widen < 4) {
        a -= T(1);
        fa = eval(a) - y;
        ++widen;
    }
    while (fb < T(0) && widen < 8) {
        b += T(1);
        fb = eval(b) - y;
        ++widen;
    }
    T tol = solve_value_tol<T>() * (T(1) + abs(y));
    return solve_increasing<T>([&](const T& u) { return eval(u) - y; },
                               [&](const T& u) { return deriv(u); }, a, b, fa,
                               fb, T(1e-3), tol, 200);
}

} // namespace circlemap

#endif
